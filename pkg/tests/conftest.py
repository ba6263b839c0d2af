import numpy as np
import pytest

from bfamily.initdata import random_smooth_field


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def smooth(n, modes=6, seed=0, offset=0.0, scale=1.0):
    return offset + scale * random_smooth_field(n, modes, np.random.default_rng(seed))


def nodes(n):
    return np.arange(n) / n


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
