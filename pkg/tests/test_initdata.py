import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfamily import spectral as sp
from bfamily.errors import ConstraintViolation
from bfamily.initdata import InitSpec, build, build_with_metadata, random_smooth_field

from conftest import nodes

G = sp.Grid(256)
HELM1 = 1 + 4 * np.pi**2


def test_momentum_first_example():
    u0, meta = build_with_metadata(InitSpec(kind="momentum-first", offset=1.0, amplitude=0.5, sign="non-negative"), G)
    np.testing.assert_allclose(u0, 1 + 0.5 * np.cos(2 * np.pi * G.x) / HELM1, atol=1e-15)
    assert meta["min_m0"] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", [16, 64, 256])
def test_momentum_first_round_trip(n):
    grid = sp.Grid(n)
    u0 = build(InitSpec(kind="momentum-first", offset=1.0, amplitude=0.5), grid)
    m0 = 1 + 0.5 * np.cos(2 * np.pi * grid.x)
    rel = float(np.max(np.abs(sp.helmholtz_apply(u0) - m0)) / np.max(np.abs(m0)))
    assert rel < 1e-12, f"relative round-trip error {rel:.2e} at n={n}"


def test_fourier_modes_example_has_sign_changing_momentum():
    u0, meta = build_with_metadata(InitSpec(offset=0.2, amplitude=0.1), G)
    np.testing.assert_allclose(u0, 0.2 + 0.1 * np.cos(2 * np.pi * G.x))
    assert meta["min_m0"] == pytest.approx(0.2 - 0.1 * HELM1, rel=1e-10)
    assert meta["max_m0"] == pytest.approx(0.2 + 0.1 * HELM1, rel=1e-10)


@pytest.mark.parametrize("sign,offset", [("non-negative", 0.3), ("non-positive", -0.3)])
def test_sign_violation(sign, offset):
    with pytest.raises(ConstraintViolation):
        build(InitSpec(kind="momentum-first", offset=offset, amplitude=0.5, sign=sign), G)


@settings(max_examples=30, deadline=None)
@given(amp=st.floats(0, 1), phase=st.floats(0, 6.3), mode=st.integers(0, 20), flip=st.booleans())
def test_sign_certificates(amp, phase, mode, flip):
    s = -1.0 if flip else 1.0
    spec = InitSpec(kind="momentum-first", offset=s, amplitude=amp, mode=mode, phase=phase, sign="non-positive" if flip else "non-negative")
    _, meta = build_with_metadata(spec, G)
    assert (meta["max_m0"] <= 0) if flip else (meta["min_m0"] >= 0)


def test_peakon_profile_is_flagged():
    u0, meta = build_with_metadata(InitSpec(kind="peakon-profile", amplitude=2.0, center=0.25), G)
    assert meta["stress_test"]
    assert u0[G.n // 4] == pytest.approx(2 * 1.0819767068693265, rel=1e-12)


def test_gaussian_bump():
    u0 = build(InitSpec(kind="gaussian-bump-periodic", amplitude=1.0, center=0.5, width=0.02), G)
    assert u0[G.n // 2] == pytest.approx(1.0)
    assert np.max(np.abs(u0[: int(0.2 * G.n)])) < 1e-30
    np.testing.assert_allclose(u0[1:], u0[1:][::-1], atol=1e-15)


def test_random_field():
    f = random_smooth_field(64, 5, np.random.default_rng(1))
    assert np.max(np.abs(f)) == pytest.approx(1.0)
    assert abs(np.mean(f)) < 1e-16
    spec = np.abs(np.fft.rfft(f))
    assert np.all(spec[6:] < 1e-12)
    with pytest.raises(ValueError):
        random_smooth_field(16, 8, np.random.default_rng(0))


def test_random_spec_is_reproducible():
    spec = InitSpec(random_modes=6, seed=4, offset=0.5, amplitude=0.2)
    np.testing.assert_array_equal(build(spec, G), build(spec, G))


@pytest.mark.parametrize(
    "kw",
    [dict(kind="sawtooth"), dict(sign="positive"), dict(sign="non-negative"), dict(mode=-1), dict(kind="gaussian-bump-periodic", width=0.0)],
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        InitSpec(**kw)


def test_nodes_helper_consistent():
    np.testing.assert_array_equal(nodes(8), sp.Grid(8).x)
