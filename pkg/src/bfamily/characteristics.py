"""Characteristic curves ``gamma_t = c u(t, gamma)^p`` and their Jacobians.

Curves are integrated offline against stored solution frames. Between frames
the solution is interpolated linearly in time; in space it is evaluated from
its Fourier series. The Jacobian ``gamma_x`` is computed twice: as the RK4
solution of ``d/dt gamma_x = p c u^(p-1) u_x gamma_x`` and as the exponential
of the time integral of ``p c u^(p-1) u_x`` along the curve (Simpson's rule on
the accepted trajectory points).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import _kernels, spectral
from .equation import Parameters
from .errors import FlowDegeneracyError


class FrameSeries:
    """Time-indexed access to stored solution frames.

    Args:
        times: strictly increasing frame times.
        frames: solution samples, one row per time.
    """

    def __init__(self, times, frames):
        self.times = np.asarray(times, dtype=float)
        u = np.asarray(frames, dtype=float)
        if u.ndim != 2 or u.shape[0] != self.times.shape[0] or u.shape[0] < 1:
            raise ValueError("need one frame per time")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("frame times must be strictly increasing")
        self.n = u.shape[1]
        coef = np.fft.rfft(u, axis=1) / self.n
        coef[:, 1 : self.n // 2] *= 2.0
        self._coef = coef
        k = np.arange(self.n // 2 + 1)
        dsym = 2j * np.pi * k
        dsym[-1] = 0.0
        self._coef_x = coef * dsym
        self.max_abs = float(np.max(np.abs(u)))

    @classmethod
    def from_states(cls, states):
        return cls([s.t for s in states], [s.u for s in states])

    def _blend(self, coef, t):
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise ValueError(f"t={t} outside stored frames [{times[0]}, {times[-1]}]")
        j = int(np.searchsorted(times, t, side="right")) - 1
        j = min(max(j, 0), len(times) - 1)
        if j == len(times) - 1 or abs(t - times[j]) <= 1e-13 * max(1.0, abs(t)):
            return coef[j]
        theta = (t - times[j]) / (times[j + 1] - times[j])
        if abs(theta - 1.0) <= 1e-12:
            return coef[j + 1]
        return (1.0 - theta) * coef[j] + theta * coef[j + 1]

    def values(self, t, x):
        """``(u, u_x)`` at time ``t`` and positions ``x``."""
        return _kernels.eval_modes_pair(
            np.ascontiguousarray(self._blend(self._coef, t)),
            np.ascontiguousarray(self._blend(self._coef_x, t)),
            np.ascontiguousarray(x, dtype=float),
        )

    def max_spacing_ok(self, c, p):
        """Frame spacing is within ``dx / (c * max|u|^p)``."""
        if len(self.times) < 2:
            return True
        speed = max(1e-12, c * self.max_abs**p)
        return float(np.max(np.diff(self.times))) <= (1.0 / self.n) / speed * (1 + 1e-12)


@dataclass(frozen=True)
class TrajectorySet:
    """Characteristics seeded at ``seeds``.

    ``lifted`` holds unreduced positions; ``gamma`` reduces them mod 1.
    ``history`` stores ``(t, p c u^(p-1) u_x)`` at every accepted point and
    feeds the quadrature form of the Jacobian.
    """

    t: float
    seeds: np.ndarray
    lifted: np.ndarray
    jac: np.ndarray
    history: tuple = field(default=(), repr=False)

    @classmethod
    def seeded(cls, seeds, frames: FrameSeries, par: Parameters, t0=None):
        seeds = np.asarray(seeds, dtype=float) % 1.0
        t0 = frames.times[0] if t0 is None else t0
        h0 = _flow_rates(frames, par, t0, seeds)[1]
        return cls(float(t0), seeds, seeds.copy(), np.ones_like(seeds), ((float(t0), h0),))

    @property
    def gamma(self):
        return self.lifted % 1.0

    @property
    def jac_quadrature(self):
        if len(self.history) < 2:
            return np.ones_like(self.seeds)
        ts = np.array([h[0] for h in self.history])
        hs = np.stack([h[1] for h in self.history])
        return np.exp(simpson(hs, x=ts, axis=0))


def _flow_rates(frames, par, t, x):
    """Curve velocity ``c u^p`` and stretching rate ``p c u^(p-1) u_x`` at ``(t, x)``."""
    u, ux = frames.values(t, x)
    up = np.ones_like(u) if par.p == 1 else u ** (par.p - 1)
    return par.c * up * u, par.p * par.c * up * ux


def advance_flow(traj: TrajectorySet, frames: FrameSeries, par: Parameters, dt) -> TrajectorySet:
    """One RK4 step of the curves and of the Jacobian ODE.

    Raises:
        FlowDegeneracyError: a Jacobian became non-positive or non-finite.
    """
    t, x, jac = traj.t, traj.lifted, traj.jac

    def rhs(tt, xx, jj):
        vel, rate = _flow_rates(frames, par, tt, xx)
        return vel, rate * jj

    k1x, k1j = rhs(t, x, jac)
    k2x, k2j = rhs(t + dt / 2, x + dt / 2 * k1x, jac + dt / 2 * k1j)
    k3x, k3j = rhs(t + dt / 2, x + dt / 2 * k2x, jac + dt / 2 * k2j)
    k4x, k4j = rhs(t + dt, x + dt * k3x, jac + dt * k3j)
    x_new = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
    j_new = jac + dt / 6 * (k1j + 2 * k2j + 2 * k3j + k4j)
    t_new = t + dt
    if not (np.all(np.isfinite(j_new)) and np.all(j_new > 0)):
        raise FlowDegeneracyError(f"characteristic Jacobian lost positivity at t={t_new:.6g}", t_new)
    h_new = _flow_rates(frames, par, t_new, x_new)[1]
    return TrajectorySet(t_new, traj.seeds, x_new, j_new, traj.history + ((t_new, h_new),))


def integrate_flow(traj: TrajectorySet, frames: FrameSeries, par: Parameters, dt, t_end) -> TrajectorySet:
    """Repeat :func:`advance_flow` until ``t_end``, shortening the last step to land on it."""
    t0 = traj.t
    n_steps = int(np.ceil(round((t_end - t0) / dt, 9)))
    for k in range(1, n_steps + 1):
        target = t_end if k == n_steps else t0 + k * dt
        traj = advance_flow(traj, frames, par, target - traj.t)
    return traj


def flow_conservation_residual(traj: TrajectorySet, m, m0, par: Parameters, quadrature=False) -> float:
    """Max over seeds of ``|m(t, gamma) * gamma_x^(b/(pc)) - m0(seed)|``."""
    jac = traj.jac_quadrature if quadrature else traj.jac
    m_gamma = spectral.interpolate(m, traj.gamma)
    m0_seed = spectral.interpolate(m0, traj.seeds)
    weight = np.exp(par.flow_exponent * np.log(jac))
    return float(np.max(np.abs(m_gamma * weight - m0_seed)))


def ordering_preserved(traj: TrajectorySet) -> bool:
    """Lifted positions of seeds sorted ascending stay strictly ascending, including the wrap-around."""
    order = np.argsort(traj.seeds)
    lifted = traj.lifted[order]
    return bool(np.all(np.diff(lifted) > 0) and lifted[-1] < lifted[0] + 1.0)
