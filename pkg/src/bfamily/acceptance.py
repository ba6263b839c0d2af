"""Acceptance criteria at reference resolution (n = 256, dt = 1e-4 unless noted).

Each criterion function returns a :class:`CriterionResult`. Expensive runs
shared between criteria are cached per process.
"""

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import characteristics as chars
from . import diagnostics as diag
from . import spectral
from .equation import Parameters, State, f_family
from .initdata import InitSpec, build, random_smooth_field
from .integrator import StepConfig, evolve

N_REF = 256
DT_REF = 1e-4
CH = Parameters(2.0, 1.0, 1)
ZERO_B = Parameters(0.0, 1.0, 1)

SUITES = {
    "spectral": (1, 11),
    "conservation": (2, 3, 8),
    "sign": (4, 9),
    "characteristics": (5,),
    "growth": (6,),
    "continuation": (7, 10),
}
SUITES["all"] = tuple(range(1, 12))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {verdict}  {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _x(n=N_REF):
    return spectral.Grid(n).x


def _energy_u0(n=N_REF):
    x = _x(n)
    return 0.2 + 0.1 * np.cos(2 * np.pi * x)


def _positive_m0(n=N_REF, sign=1.0):
    return sign * (1.0 + 0.5 * np.cos(2 * np.pi * _x(n)))


def _run(u0, par, t_end, dt=DT_REF, stride=100, frame_stride=None, formulation="nonlocal-u"):
    cfg = StepConfig(dt=dt, t_end=t_end, formulation=formulation)
    return evolve(State(0.0, u0), par, cfg, observers=(lambda s: diag.report(s, par),), stride=stride, frame_stride=frame_stride)


@lru_cache(maxsize=None)
def _energy_run_timed():
    start = time.perf_counter()
    res = _run(_energy_u0(), CH, 1.0)
    return res, time.perf_counter() - start


def energy_run():
    return _energy_run_timed()[0]


@lru_cache(maxsize=None)
def energy_half_run(formulation="nonlocal-u", n=N_REF):
    return _run(_energy_u0(n), CH, 0.5, stride=1000, formulation=formulation)


@lru_cache(maxsize=None)
def mean_run(b, p):
    return _run(_energy_u0(), Parameters(b, 1.0, p), 1.0)


@lru_cache(maxsize=None)
def sign_run(b, sign):
    # the positive b = 0 run doubles as the growth run, so it is observed densely
    stride = 10 if (b == 0.0 and sign > 0) else 100
    u0 = spectral.helmholtz_invert_spectral(_positive_m0(sign=sign))
    return _run(u0, Parameters(b, 1.0, 1), 2.0, stride=stride)


@lru_cache(maxsize=None)
def characteristic_run():
    u0 = spectral.helmholtz_invert_spectral(_positive_m0())
    return _run(u0, CH, 0.5, stride=1000, frame_stride=1)


@lru_cache(maxsize=None)
def quadratic_positive_run():
    u0 = spectral.helmholtz_invert_spectral(_positive_m0())
    return _run(u0, Parameters(2.0, 1.0, 2), 1.0)


def _timed(number, title, fn):
    start = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - start)


def _order(e_coarse, e_fine):
    return math.log2(e_coarse / e_fine)


def c1_spectral_oracle():
    ns = (64, 128, 256, 512)
    rng = np.random.default_rng(2024)
    fields = 20
    band = 8
    coeffs = [(rng.standard_normal(band + 1), rng.standard_normal(band + 1)) for _ in range(fields)]
    errs = np.zeros((fields, len(ns)))
    round_trip = np.zeros(len(ns))
    for j, n in enumerate(ns):
        x = _x(n)
        k = np.arange(band + 1)[:, None]
        cos_t, sin_t = np.cos(2 * np.pi * k * x), np.sin(2 * np.pi * k * x)
        for i, (a, b) in enumerate(coeffs):
            f = a @ cos_t + b @ sin_t
            spec = spectral.helmholtz_invert_spectral(f)
            conv = spectral.helmholtz_invert_convolution(f)
            errs[i, j] = np.max(np.abs(spec - conv))
            rt = np.max(np.abs(spectral.helmholtz_apply(spec) - f)) / np.max(np.abs(f))
            round_trip[j] = max(round_trip[j], rt)
    worst = errs.max(axis=0)
    orders = [_order(worst[j], worst[j + 1]) for j in range(len(ns) - 1)]
    per_field = min(_order(errs[i, j], errs[i, j + 1]) for i in range(fields) for j in range(len(ns) - 1))
    order_ok = all(o >= 2.0 for o in orders)
    rt_ok = bool(np.all(round_trip <= 1e-12))
    detail = (
        f"orders {', '.join(f'{o:.3f}' for o in orders)} (need >= 2; per-field min {per_field:.3f}); "
        f"round-trip rel err {', '.join(f'{r:.1e}' for r in round_trip)} at n={list(ns)} (need <= 1e-12)"
    )
    return order_ok and rt_ok, detail


def c2_energy():
    res, elapsed = _energy_run_timed()
    d = diag.drift(res.observations[0], CH)
    ok = not res.breaking and d["H2"] < 1e-8 and d["H1"] < 1e-10 and elapsed < 60
    return ok, f"H2 drift {d['H2']:.2e} (< 1e-8), H1 drift {d['H1']:.2e} (< 1e-10), run {elapsed:.1f}s (< 60s)"


def c3_momentum():
    parts, ok = [], True
    for b, p in ((0.0, 1), (2.0, 2)):
        res = mean_run(b, p)
        q = np.array([r.M_total for r in res.observations[0]])
        d = float(np.max(np.abs(q - q[0])) / abs(q[0]))
        ok = ok and not res.breaking and d < 1e-9
        parts.append(f"(b={b:g},p={p}) {d:.2e}")
    return ok, "integral of m drift " + ", ".join(parts) + " (< 1e-9)"


def c4_sign():
    parts, ok = [], True
    for b in (0.0, 2.0):
        for sign in (1.0, -1.0):
            res = sign_run(b, sign)
            series = res.observations[0]
            # sign_check scales tol by max|m0| = 1.5, so this is an absolute 1e-6
            sc = diag.sign_check(series, _positive_m0(sign=sign), tol=1e-6 / 1.5)
            l1 = diag.l1_drift(series)
            ok = ok and not res.breaking and sc.passed and l1 < 1e-7
            worst = min(sc.min_m, sc.min_u) if sign > 0 else -max(sc.max_m, sc.max_u)
            parts.append(f"b={b:g} {'+' if sign > 0 else '-'}m0: signed min {worst:.3g}, L1 drift {l1:.1e}")
    return ok, "; ".join(parts)


def c5_flow():
    res = characteristic_run()
    frames = chars.FrameSeries.from_states(res.frames)
    seeds = (np.arange(64) + 0.5) / 64
    traj = chars.TrajectorySet.seeded(seeds, frames, CH)
    traj = chars.integrate_flow(traj, frames, CH, 2e-4, 0.5)
    m0 = _positive_m0()
    resid = chars.flow_conservation_residual(traj, res.final.m, m0, CH)
    jq = traj.jac_quadrature
    gap = float(np.max(np.abs(traj.jac - jq) / np.abs(traj.jac)))
    positive = bool(np.all(traj.jac > 0))
    ok = not res.breaking and resid < 1e-5 and gap < 1e-6 and positive
    return ok, f"flow residual {resid:.2e} (< 1e-5), Jacobian gap {gap:.1e} (< 1e-6), min Jacobian {traj.jac.min():.3f}"


def c6_growth():
    res = sign_run(0.0, 1.0)
    series = res.observations[0]
    u0 = spectral.helmholtz_invert_spectral(_positive_m0())
    g = diag.growth_envelope_check(series, ZERO_B, u0=u0)
    bound = diag.ux_bound_check(series, _positive_m0(), ZERO_B)
    ok = not res.breaking and bound.passed and g.identity_residual < 1e-6 and g.envelope_ok
    return ok, (
        f"reached t={res.final.t:g}, sup|u_x| {bound.observed_K:.3f} <= {bound.bound:.3f}, "
        f"dI/dt residual {g.identity_residual:.1e} (< 1e-6), envelope {'held' if g.envelope_ok else 'violated'}"
    )


def c7_identity():
    runs = [energy_run(), mean_run(0.0, 1), mean_run(2.0, 2)]
    runs += [sign_run(b, s) for b in (0.0, 2.0) for s in (1.0, -1.0)]
    worst = max(r.eq606_residual for run in runs for r in run.observations[0])
    frames = sum(len(run.observations[0]) for run in runs)
    return worst < 1e-10, f"max |F + u_t + c u^p u_x| {worst:.1e} over {frames} frames (< 1e-10)"


def c8_formulations():
    a = energy_half_run("nonlocal-u").final.u
    b = energy_half_run("momentum-m").final.u
    diff = float(np.max(np.abs(a - b)))
    return diff < 1e-7, f"|u-form - m-form| {diff:.1e} at t=0.5 (< 1e-7)"


def _f_scale(f):
    return max(float(np.max(np.abs(f))), 1e-300)


def c9_f_sign():
    rng = np.random.default_rng(99)
    frames = [random_smooth_field(N_REF, 12, rng) + off for off in np.linspace(-0.5, 0.5, 10)]
    frames += [r.u for r in (sign_run(0.0, 1.0).final, sign_run(2.0, -1.0).final, energy_run().final)]

    def worst(par):
        return min(float(np.min(f) / _f_scale(f)) for f in (f_family(u, par) for u in frames))

    worst_h1 = min(worst(Parameters(b, 1.0, 1)) for b in (0.0, 1.0, 2.0, 3.0))
    worst_p3 = worst(Parameters(3.0, 1.0, 3))
    p2 = Parameters(2.0, 1.0, 2)
    res = quadratic_positive_run()
    worst_p2 = min(r.f_min / max(abs(r.f_max), 1e-300) for r in res.observations[0])
    ok = worst_h1 >= -1e-12 and worst_p3 >= -1e-12 and worst_p2 >= -1e-6 and not res.breaking and p2.is_H2
    return ok, f"min f/scale: H1 {worst_h1:.1e}, H2 p=3 {worst_p3:.1e} (>= -1e-12), H2 p=2 m0>=0 {worst_p2:.1e} (>= -1e-6)"


def c10_continuation():
    rng = np.random.default_rng(7)
    positives = [State(0.0, random_smooth_field(N_REF, 10, rng) + 1.5) for _ in range(5)]
    positives.append(sign_run(2.0, 1.0).final)
    windows = [(0.0, 0.2), (0.1, 0.35), (0.4, 0.9), (0.75, 1.0), (0.0, 1.0)]
    smallest = min(diag.continuation_probe(s, CH, w).window_integral for s in positives for w in windows)
    bump = build(InitSpec(kind="gaussian-bump-periodic", amplitude=1.0, center=0.5, width=0.02), spectral.Grid(N_REF))
    rec = diag.continuation_probe(State(0.0, bump), CH, (0.0, 0.2))
    ok = smallest > 0 and rec.window_max_u < 1e-8 and rec.window_integral > 1e-4
    return ok, (
        f"min window integral for u > 0: {smallest:.3g} (> 0); bump: window max|u| {rec.window_max_u:.1e} (< 1e-8), "
        f"window integral {rec.window_integral:.3g} (> 1e-4)"
    )


def c11_convergence():
    u0 = _energy_u0()
    dts = (0.005, 0.0025, 0.00125)
    finals = [evolve(State(0.0, u0), CH, StepConfig(dt=dt, t_end=0.5)).final.u for dt in dts]
    order = _order(np.max(np.abs(finals[0] - finals[1])), np.max(np.abs(finals[1] - finals[2])))
    coarse = energy_half_run("nonlocal-u", N_REF).final.u
    fine = energy_half_run("nonlocal-u", 2 * N_REF).final.u[::2]
    rel = float(np.max(np.abs(coarse - fine)) / np.max(np.abs(fine)))
    return order >= 3.8 and rel < 1e-9, f"RK4 order {order:.3f} (>= 3.8), n 256->512 relative change {rel:.1e} (< 1e-9)"


CRITERIA = {
    1: ("spectral vs convolution inverse", c1_spectral_oracle),
    2: ("energy conservation, CH", c2_energy),
    3: ("momentum integral conservation", c3_momentum),
    4: ("sign preservation", c4_sign),
    5: ("flow identity along characteristics", c5_flow),
    6: ("global regime boundedness", c6_growth),
    7: ("non-local identity", c7_identity),
    8: ("formulation cross-check", c8_formulations),
    9: ("sign of f", c9_f_sign),
    10: ("continuation probe", c10_continuation),
    11: ("convergence", c11_convergence),
}


def run_criterion(number) -> CriterionResult:
    title, fn = CRITERIA[number]
    return _timed(number, title, fn)


def run_suite(name, emit=None):
    """Run every criterion of suite ``name``; ``emit`` receives each result as it completes."""
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for number in SUITES[name]:
        res = run_criterion(number)
        if emit is not None:
            emit(res)
        out.append(res)
    return out
