"""Conserved quantities, sign and growth checks, and unique-continuation probes.

Integrals over the circle use the mean of the nodal samples, which is exact
for trigonometric polynomials of degree below ``n``.
"""

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import spectral
from .equation import F_family, Parameters, State, advection, f_family, rhs_nonlocal
from .errors import PreconditionError

CSV_COLUMNS = (
    "t", "H1", "H2", "M_total", "L1_m", "I_u", "sup_u", "sup_ux",
    "min_m", "max_m", "f_min", "f_max", "eq606_residual",
)  # fmt: skip

SIGN_TOL = 1e-6
DRIFT_FLOOR = 1e-12


@dataclass(frozen=True)
class InvariantReport:
    t: float
    H1: float
    H2: float
    M_total: float
    L1_m: float
    I_u: float
    sup_u: float
    sup_ux: float
    min_m: float
    max_m: float
    f_min: float
    f_max: float
    eq606_residual: float
    L1_u: float = 0.0
    min_u: float = 0.0
    max_u: float = 0.0
    dI_rhs: float = 0.0
    dI_identity_residual: float = float("nan")

    def csv_row(self):
        return tuple(getattr(self, name) for name in CSV_COLUMNS)

    def as_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return tuple(f.name for f in fields(cls))


def report(s: State, par: Parameters, dealias: bool = True) -> InvariantReport:
    """Evaluate every monitored quantity on one state."""
    u = s.u
    ux = spectral.derivative(u, 1)
    uxx = spectral.derivative(u, 2)
    uxxx = spectral.derivative(u, 3)
    m = u - uxx
    f = f_family(u, par)
    ut = rhs_nonlocal(u, par, dealias)
    residual = ut + advection(u, par, dealias) + F_family(u, par, dealias)
    c = par.c
    return InvariantReport(
        t=float(s.t),
        H1=float(np.mean(u)),
        H2=float(0.5 * np.mean(u * u + ux * ux)),
        M_total=float(np.mean(m)),
        L1_m=float(np.mean(np.abs(m))),
        I_u=float(np.mean((u * u + ux * ux) / 4 + (ux * ux + uxx * uxx) / 2 + (uxx * uxx + uxxx * uxxx) / 2)),
        sup_u=float(np.max(np.abs(u))),
        sup_ux=float(np.max(np.abs(ux))),
        min_m=float(np.min(m)),
        max_m=float(np.max(m)),
        f_min=float(np.min(f)),
        f_max=float(np.max(f)),
        eq606_residual=float(np.max(np.abs(residual))),
        L1_u=float(np.mean(np.abs(u))),
        min_u=float(np.min(u)),
        max_u=float(np.max(u)),
        dI_rhs=float(-2 * c * np.mean(ux * uxx * uxx) - 0.5 * c * np.mean(ux * uxxx * uxxx)),
    )


def _column(series, name):
    return np.array([getattr(r, name) for r in series], dtype=float)


def sign_preserved(series, tol=SIGN_TOL):
    """``+1``/``-1`` if the momentum kept one sign over the run (up to ``tol`` times its initial size), else 0."""
    if not series:
        return 0
    scale = max(abs(series[0].min_m), abs(series[0].max_m))
    lo, hi = _column(series, "min_m"), _column(series, "max_m")
    if np.all(lo >= -tol * scale):
        return 1
    if np.all(hi <= tol * scale):
        return -1
    return 0


def drift(series, par: Parameters, eps=DRIFT_FLOOR):
    """Max relative drift ``|Q(t) - Q(0)| / max(|Q(0)|, eps)`` of each invariant ``par`` conserves."""
    names = []
    if par.conserves_mean:
        names += ["H1", "M_total"]
    if par.conserves_energy:
        names.append("H2")
    if par.conserves_mean and sign_preserved(series) != 0:
        names.append("L1_m")
    out = {}
    for name in names:
        q = _column(series, name)
        out[name] = float(np.max(np.abs(q - q[0])) / max(abs(q[0]), eps)) if q.size else 0.0
    return out


def l1_drift(series, eps=DRIFT_FLOOR):
    """Relative drift of ``||u||_1``, conserved for one-signed solutions when the mean is."""
    q = _column(series, "L1_u")
    return float(np.max(np.abs(q - q[0])) / max(abs(q[0]), eps)) if q.size else 0.0


@dataclass(frozen=True)
class GrowthCheck:
    passed: bool
    identity_ok: bool
    envelope_ok: bool
    identity_residual: float
    identity_ratio: float
    fitted_rate: float
    bound_rate: float
    C2: float


def _require_zero_b(par):
    if par is not None and not (par.p == 1 and par.b == 0.0):
        raise PreconditionError(f"check is only valid for p = 1, b = 0, got {par}")


def growth_envelope_check(series, par: Parameters, u0=None) -> GrowthCheck:
    """Check the energy identity ``dI/dt = R(t)`` and the exponential envelope of ``I(u)``.

    ``dI/dt`` is a second-order finite difference of the observed ``I_u``
    series; the identity passes where ``|dI/dt - R| <= max(1e-6, 1e-3 |R|)``.
    The envelope rate is ``c * A`` with ``A = 2 * C2`` and ``C2`` the largest
    observed ``sup|u_x|``, which bounds ``c * C2 * int(2 u_xx^2 + u_xxx^2 / 2)``
    by ``c * A * I``. ``u0``, when given, must reproduce the first observation.
    """
    _require_zero_b(par)
    if len(series) < 3:
        raise PreconditionError("growth check needs at least three observations")
    t = _column(series, "t")
    eye = _column(series, "I_u")
    rhs = _column(series, "dI_rhs")
    if u0 is not None:
        i0 = report(State(0.0, u0), par).I_u
        if not math.isclose(i0, eye[0], rel_tol=1e-9, abs_tol=1e-300):
            raise PreconditionError("series does not start from the given initial data")
    d_eye = np.gradient(eye, t, edge_order=2)
    resid = np.abs(d_eye - rhs)
    tol = np.maximum(1e-6, 1e-3 * np.abs(rhs))
    identity_ok = bool(np.all(resid <= tol))
    c2 = float(np.max(_column(series, "sup_ux")))
    bound_rate = par.c * 2.0 * c2
    envelope = eye[0] * np.exp(bound_rate * (t - t[0])) * (1 + 1e-6)
    envelope_ok = bool(np.all(eye <= envelope))
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = np.log(eye[1:] / eye[0]) / (t[1:] - t[0])
    rates = rates[np.isfinite(rates)]
    fitted = float(np.max(rates)) if rates.size else 0.0
    return GrowthCheck(
        passed=identity_ok and envelope_ok,
        identity_ok=identity_ok,
        envelope_ok=envelope_ok,
        identity_residual=float(np.max(resid)),
        identity_ratio=float(np.max(resid / tol)),
        fitted_rate=fitted,
        bound_rate=bound_rate,
        C2=c2,
    )


def with_identity_residuals(series):
    """Copy of ``series`` with ``dI_identity_residual`` filled from finite differences of ``I_u``."""
    if len(series) < 3:
        return list(series)
    t = _column(series, "t")
    d_eye = np.gradient(_column(series, "I_u"), t, edge_order=2)
    out = []
    for r, d in zip(series, d_eye):
        vals = r.as_dict()
        vals["dI_identity_residual"] = float(abs(d - r.dI_rhs))
        out.append(InvariantReport(**vals))
    return out


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    observed_K: float
    bound: float
    C1: float


def ux_bound_check(series, m0, par: Parameters | None = None) -> BoundCheck:
    """Check ``sup|u_x| <= ||m0||_1 + ||u(t)||_1`` at every observation.

    Raises:
        PreconditionError: ``m0`` changes sign, or ``par`` is outside ``p = 1, b = 0``.
    """
    _require_zero_b(par)
    m0 = np.asarray(m0, dtype=float)
    tol = SIGN_TOL * float(np.max(np.abs(m0)))
    if np.min(m0) < -tol and np.max(m0) > tol:
        raise PreconditionError("initial momentum changes sign")
    c1 = float(np.mean(np.abs(m0)))
    sup_ux = _column(series, "sup_ux")
    bounds = c1 + _column(series, "L1_u")
    return BoundCheck(
        passed=bool(np.all(sup_ux <= bounds)),
        observed_K=float(np.max(sup_ux)),
        bound=float(np.min(bounds)),
        C1=c1,
    )


@dataclass(frozen=True)
class BreakingStatus:
    status: str
    t_star: float | None
    S_max: float
    envelope_ok: bool | None = None


def breaking_monitor(series, M, par: Parameters | None = None) -> BreakingStatus:
    """Track ``S(t) = sup|u| + sup|u_x|`` against the threshold ``M``.

    When ``S`` stays below ``M`` and ``par`` is in the ``p = 1, b = 0`` regime
    the growth envelope of ``I(u)`` is checked as well.
    """
    if not M > 0:
        raise ValueError("threshold must be positive")
    s_vals = _column(series, "sup_u") + _column(series, "sup_ux")
    over = np.nonzero(s_vals >= M)[0]
    s_max = float(np.max(s_vals)) if s_vals.size else 0.0
    if over.size:
        return BreakingStatus("guard-tripped", float(series[over[0]].t), s_max)
    envelope_ok = None
    if par is not None and par.p == 1 and par.b == 0.0 and len(series) >= 3:
        envelope_ok = growth_envelope_check(series, par).envelope_ok
    return BreakingStatus("bounded", None, s_max, envelope_ok)


@dataclass(frozen=True)
class SignCheck:
    passed: bool
    sign: int
    min_m: float
    min_u: float
    max_m: float
    max_u: float
    tol: float


def sign_check(series, m0, tol=SIGN_TOL) -> SignCheck:
    """Momentum and velocity keep the sign of a one-signed ``m0`` up to ``tol * ||m0||_inf``."""
    m0 = np.asarray(m0, dtype=float)
    scale = float(np.max(np.abs(m0)))
    if np.min(m0) >= 0:
        sign = 1
    elif np.max(m0) <= 0:
        sign = -1
    else:
        raise PreconditionError("initial momentum changes sign")
    lo_m, hi_m = float(np.min(_column(series, "min_m"))), float(np.max(_column(series, "max_m")))
    lo_u = float(np.min(_column(series, "min_u")))
    hi_u = float(np.max(_column(series, "max_u")))
    bound = tol * scale
    if sign > 0:
        passed = lo_m >= -bound and lo_u >= -bound
    else:
        passed = hi_m <= bound and hi_u <= bound
    return SignCheck(passed, sign, lo_m, lo_u, hi_m, hi_u, bound)


def ux_has_zero(u) -> bool:
    """``u_x`` vanishes or changes sign somewhere on the circle (always, by periodicity)."""
    ux = spectral.derivative(u, 1)
    if np.all(ux == 0):
        return True
    return bool(np.any(ux * np.roll(ux, -1) <= 0))


@dataclass(frozen=True)
class ProbeRecord:
    window: tuple
    window_max_u: float
    F_jump: float
    window_integral: float
    global_max_u: float
    ut_a: float
    ut_b: float
    threshold: float
    implication_holds: bool


def continuation_probe(s: State, par: Parameters, window, delta=1e-10, rel_threshold=1e-6) -> ProbeRecord:
    """Quantities entering the unique-continuation argument on ``window = (a, b)``.

    Reports ``max|u|`` on the window, ``F(b) - F(a)``, the integral of the
    Helmholtz inverse of ``f`` over the window and the global ``max|u|``. If
    the solution is non-trivial (global max above ``delta``) at least one of
    the first three must exceed ``rel_threshold * max|u|^(p+1)``.
    """
    if not (par.is_H1 or par.is_H2):
        raise PreconditionError(f"probe needs p = 1 with 0 <= b <= 3c, or b = pc; got {par}")
    a, b = (float(v) for v in window)
    if not (0.0 <= a < b <= 1.0):
        raise PreconditionError(f"window must satisfy 0 <= a < b <= 1, got {window!r}")
    u = s.u
    n = u.shape[0]
    pts = np.linspace(a, b, max(3, int(math.ceil((b - a) * 4 * n)) + 1))
    window_max = float(np.max(np.abs(spectral.interpolate(u, pts))))
    big_f = F_family(u, par)
    fa, fb = spectral.interpolate(big_f, np.array([a, b]))
    lam_f = spectral.helmholtz_invert_spectral(f_family(u, par))
    integral = spectral.integrate_between(lam_f, a, b)
    global_max = float(np.max(np.abs(u)))
    ut = rhs_nonlocal(u, par)
    ut_a, ut_b = spectral.interpolate(ut, np.array([a, b]))
    threshold = rel_threshold * global_max ** (par.p + 1)
    quantities = (window_max, abs(fb - fa), abs(integral))
    holds = global_max <= delta or any(q > threshold for q in quantities)
    return ProbeRecord(
        window=(a, b),
        window_max_u=window_max,
        F_jump=float(fb - fa),
        window_integral=float(integral),
        global_max_u=global_max,
        ut_a=float(ut_a),
        ut_b=float(ut_b),
        threshold=threshold,
        implication_holds=bool(holds),
    )
