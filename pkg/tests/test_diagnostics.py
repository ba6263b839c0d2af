import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfamily import diagnostics as dg
from bfamily import spectral as sp
from bfamily.equation import Parameters, State
from bfamily.errors import PreconditionError
from bfamily.initdata import InitSpec, build
from bfamily.integrator import StepConfig, evolve

from conftest import nodes, smooth

CH = Parameters(2.0, 1.0, 1)
ZERO_B = Parameters(0.0, 1.0, 1)
W = 2 * np.pi


def test_report_of_mode():
    n = 64
    u = 0.3 + np.cos(W * nodes(n))
    r = dg.report(State(0.5, u), CH)
    helm = 1 + W**2
    assert r.t == 0.5
    assert r.H1 == pytest.approx(0.3, rel=1e-14)
    assert r.H2 == pytest.approx(0.5 * (0.09 + 0.5 + W**2 / 2), rel=1e-13)
    assert r.M_total == pytest.approx(0.3, rel=1e-12)
    expected_i = 0.25 * (0.09 + 0.5) + 0.75 * W**2 / 2 + W**4 / 2 + 0.5 * W**6 / 2
    assert r.I_u == pytest.approx(expected_i, rel=1e-12)
    assert r.sup_u == pytest.approx(1.3)
    assert r.sup_ux == pytest.approx(W * np.max(np.abs(np.sin(W * nodes(n)))), rel=1e-12)
    assert r.min_m == pytest.approx(0.3 - helm, rel=1e-11)
    assert r.max_m == pytest.approx(0.3 + helm, rel=1e-11)
    assert r.eq606_residual < 1e-12
    assert r.L1_u == pytest.approx(np.mean(np.abs(u)))
    assert len(r.csv_row()) == len(dg.CSV_COLUMNS)
    assert set(dg.CSV_COLUMNS) <= set(r.field_names())


def test_drift_selection():
    s = [dg.report(State(0.0, np.full(16, 1.0)), par) for par in (CH,)]
    assert set(dg.drift(s, CH)) == {"H1", "M_total", "H2", "L1_m"}
    assert set(dg.drift(s, Parameters(1.0, 1.0, 2))) == set()
    assert set(dg.drift(s, Parameters(2.0, 1.0, 2))) == {"H1", "M_total", "L1_m"}
    assert set(dg.drift(s, Parameters(3.0, 1.0, 2))) == {"H2"}


def test_drift_values_and_floor():
    rows = [dg.report(State(0.0, np.zeros(16)), CH), dg.report(State(0.1, np.zeros(16)), CH)]
    assert all(v == 0.0 for v in dg.drift(rows, CH).values())
    a = dg.report(State(0.0, np.full(16, 2.0)), CH)
    b = dg.report(State(0.1, np.full(16, 2.002)), CH)
    assert dg.drift([a, b], CH)["H1"] == pytest.approx(1e-3, rel=1e-9)


def test_sign_preserved():
    pos = [dg.report(State(0.0, 1 + 0.01 * np.cos(W * nodes(32))), CH)]
    neg = [dg.report(State(0.0, -1 - 0.01 * np.cos(W * nodes(32))), CH)]
    mixed = [dg.report(State(0.0, np.cos(W * nodes(32))), CH)]
    assert dg.sign_preserved(pos) == 1 and dg.sign_preserved(neg) == -1 and dg.sign_preserved(mixed) == 0
    assert dg.sign_preserved([]) == 0


@pytest.fixture(scope="module")
def zero_b_series():
    m0 = 1 + 0.5 * np.cos(W * nodes(64))
    res = evolve(
        State(0.0, sp.helmholtz_invert_spectral(m0)),
        ZERO_B,
        StepConfig(dt=1e-3, t_end=0.5),
        observers=(lambda s: dg.report(s, ZERO_B),),
        stride=5,
    )
    return m0, res.observations[0]


def test_growth_check(zero_b_series):
    m0, series = zero_b_series
    g = dg.growth_envelope_check(series, ZERO_B, u0=sp.helmholtz_invert_spectral(m0))
    assert g.passed and g.identity_residual < 1e-6 and g.fitted_rate <= g.bound_rate
    assert g.C2 == pytest.approx(max(r.sup_ux for r in series))
    with pytest.raises(PreconditionError):
        dg.growth_envelope_check(series, ZERO_B, u0=np.zeros(64))
    with pytest.raises(PreconditionError):
        dg.growth_envelope_check(series, CH)
    with pytest.raises(PreconditionError):
        dg.growth_envelope_check(series[:2], ZERO_B)


def test_identity_residuals(zero_b_series):
    _, series = zero_b_series
    filled = dg.with_identity_residuals(series)
    assert all(r.dI_identity_residual < 1e-6 for r in filled)
    assert np.isnan(series[0].dI_identity_residual)


def test_ux_bound(zero_b_series):
    m0, series = zero_b_series
    b = dg.ux_bound_check(series, m0, ZERO_B)
    assert b.passed and b.C1 == pytest.approx(1.0) and b.observed_K <= b.bound
    with pytest.raises(PreconditionError):
        dg.ux_bound_check(series, np.cos(W * nodes(64)), ZERO_B)
    with pytest.raises(PreconditionError):
        dg.ux_bound_check(series, m0, CH)


def test_breaking_monitor(zero_b_series):
    _, series = zero_b_series
    ok = dg.breaking_monitor(series, 100.0, ZERO_B)
    assert ok.status == "bounded" and ok.t_star is None and ok.envelope_ok
    tripped = dg.breaking_monitor(series, 1.0)
    assert tripped.status == "guard-tripped" and tripped.t_star == 0.0
    with pytest.raises(ValueError):
        dg.breaking_monitor(series, 0.0)


def test_sign_check(zero_b_series):
    m0, series = zero_b_series
    assert dg.sign_check(series, m0).passed
    with pytest.raises(PreconditionError):
        dg.sign_check(series, np.cos(W * nodes(64)))
    assert not dg.sign_check(series, -m0).passed


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), offset=st.floats(-2, 2))
def test_ux_always_has_zero(seed, offset):
    assert dg.ux_has_zero(smooth(64, seed=seed, offset=offset))


def test_ux_zero_for_constant():
    assert dg.ux_has_zero(np.full(16, 3.0))


def test_probe_zero_solution():
    rec = dg.continuation_probe(State(0.0, np.zeros(64)), CH, (0.1, 0.3))
    assert rec.implication_holds and rec.global_max_u == 0.0


def test_probe_bump_outside_window():
    u = build(InitSpec(kind="gaussian-bump-periodic", amplitude=1.0, center=0.5, width=0.02), sp.Grid(256))
    rec = dg.continuation_probe(State(0.0, u), CH, (0.0, 0.2))
    assert rec.window_max_u < 1e-8
    assert rec.window_integral > 1e-4
    assert rec.implication_holds


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6), a=st.floats(0, 0.9), width=st.floats(0.01, 0.1), b=st.sampled_from([0.0, 1.0, 3.0]))
def test_probe_integral_positive_for_positive_u(seed, a, width, b):
    u = smooth(64, seed=seed, offset=1.5)
    rec = dg.continuation_probe(State(0.0, u), Parameters(b, 1.0, 1), (a, min(1.0, a + width)))
    assert rec.window_integral > 0 and rec.implication_holds


def test_probe_preconditions():
    s = State(0.0, np.ones(16))
    with pytest.raises(PreconditionError):
        dg.continuation_probe(s, Parameters(1.0, 1.0, 2), (0.0, 0.5))
    with pytest.raises(PreconditionError):
        dg.continuation_probe(s, CH, (0.5, 0.5))
