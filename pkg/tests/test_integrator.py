import math

import numpy as np
import pytest

from bfamily import spectral as sp
from bfamily.equation import Parameters, State
from bfamily.errors import PreconditionError
from bfamily.integrator import StepConfig, evolve, max_stable_dt, step

from conftest import nodes

CH = Parameters(2.0, 1.0, 1)


def energy_state(n):
    return State(0.0, 0.2 + 0.1 * np.cos(2 * np.pi * nodes(n)))


@pytest.mark.parametrize(
    "kw",
    [
        dict(dt=0.0, t_end=1.0),
        dict(dt=0.2, t_end=1.0),
        dict(dt=1e-3, t_end=0.0),
        dict(dt=1e-3, t_end=1.0, formulation="spectral"),
        dict(dt=1e-3, t_end=1.0, cfl_limit=0.0),
        dict(dt=1e-3, t_end=1.0, max_value_guard=-1.0),
    ],
)
def test_step_config_validation(kw):
    with pytest.raises(ValueError):
        StepConfig(**kw)


def test_cfl_limit_formula():
    u = np.full(64, 2.0)
    assert max_stable_dt(u, Parameters(1.0, 3.0, 2), 0.5) == pytest.approx(0.5 / (64 * 3.0 * 4.0))
    assert max_stable_dt(np.zeros(64), CH, 0.5) > 1e6


def test_cfl_violation_raises():
    s = State(0.0, np.full(64, 10.0))
    with pytest.raises(PreconditionError):
        step(s, CH, StepConfig(dt=0.01, t_end=1.0))
    with pytest.raises(PreconditionError, match="step 1"):
        evolve(s, CH, StepConfig(dt=0.01, t_end=1.0))


def test_t_end_must_follow_start():
    with pytest.raises(ValueError):
        evolve(State(2.0, np.zeros(16)), CH, StepConfig(dt=0.01, t_end=1.0))


def test_step_equals_one_evolve_step():
    s = energy_state(64)
    cfg = StepConfig(dt=1e-3, t_end=1e-3)
    np.testing.assert_array_equal(step(s, CH, cfg).u, evolve(s, CH, cfg).final.u)


def test_final_time_and_observer_cadence():
    s = energy_state(32)
    cfg = StepConfig(dt=0.003, t_end=0.031)
    res = evolve(s, CH, cfg, observers=(lambda st: st.t,), stride=3, frame_stride=4)
    assert res.final.t == 0.031
    assert res.steps == math.ceil(0.031 / 0.003)
    assert res.observations[0] == res.times
    assert res.times[0] == 0.0 and res.times[-1] == 0.031
    assert res.times[1:-1] == pytest.approx([0.009, 0.018, 0.027])
    assert [f.t for f in res.frames] == pytest.approx([0.0, 0.012, 0.024, 0.031])


def test_constant_state_is_fixed():
    s = State(0.0, np.full(32, 0.7))
    res = evolve(s, CH, StepConfig(dt=1e-3, t_end=0.05))
    np.testing.assert_allclose(res.final.u, 0.7, atol=1e-14)


def test_formulations_agree_on_short_run():
    s = energy_state(64)
    a = evolve(s, CH, StepConfig(dt=1e-3, t_end=0.1)).final.u
    b = evolve(s, CH, StepConfig(dt=1e-3, t_end=0.1, formulation="momentum-m")).final.u
    assert np.max(np.abs(a - b)) < 1e-13


def test_rk4_order():
    s = energy_state(64)
    finals = [evolve(s, CH, StepConfig(dt=dt, t_end=0.4)).final.u for dt in (0.008, 0.004, 0.002)]
    order = np.log2(np.max(np.abs(finals[0] - finals[1])) / np.max(np.abs(finals[1] - finals[2])))
    assert order > 3.8


def test_guard_trip_ends_run():
    s = State(0.0, 0.5 * np.sin(2 * np.pi * nodes(128)))
    res = evolve(s, CH, StepConfig(dt=2e-4, t_end=1.0, max_value_guard=20.0), observers=(lambda st: st.t,))
    assert res.breaking and res.reason == "guard"
    assert 0.3 < res.t_break < 0.6
    assert res.final.t < res.t_break
    sup = np.max(np.abs(res.final.u)) + np.max(np.abs(sp.derivative(res.final.u, 1)))
    assert sup <= 20.0


def test_undealiased_option_runs():
    s = energy_state(64)
    a = evolve(s, CH, StepConfig(dt=1e-3, t_end=0.05, dealias=False)).final.u
    b = evolve(s, CH, StepConfig(dt=1e-3, t_end=0.05)).final.u
    assert np.max(np.abs(a - b)) < 1e-10
