"""Classical RK4 time stepping with a breakdown guard."""

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import spectral
from .equation import Parameters, State, rhs_momentum, rhs_nonlocal
from .errors import BreakdownError, NumericDomainError, PreconditionError

FORMULATIONS = ("nonlocal-u", "momentum-m")
CFL_EPS = 1e-12


@dataclass(frozen=True)
class StepConfig:
    dt: float
    t_end: float
    formulation: str = "nonlocal-u"
    cfl_limit: float = 0.5
    max_value_guard: float = 1e6
    dealias: bool = True

    def __post_init__(self):
        if not (0 < self.dt <= 0.1):
            raise ValueError(f"dt must lie in (0, 0.1], got {self.dt!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"formulation must be one of {FORMULATIONS}, got {self.formulation!r}")
        if not (0 < self.cfl_limit <= 1):
            raise ValueError(f"cfl_limit must lie in (0, 1], got {self.cfl_limit!r}")
        if not self.max_value_guard > 0:
            raise ValueError(f"max_value_guard must be positive, got {self.max_value_guard!r}")


def max_stable_dt(u, par, cfl_limit):
    speed = max(CFL_EPS, par.c * float(np.max(np.abs(u))) ** par.p)
    return cfl_limit / (u.shape[0] * speed)


def _check_cfl(u, par, dt, cfl_limit):
    limit = max_stable_dt(u, par, cfl_limit)
    if dt > limit * (1 + 1e-12):
        raise PreconditionError(f"dt={dt:g} exceeds the advective limit {limit:.6g}")


class _Stepper:
    """RK4 on the raw evolved variable (``u`` or ``m``), reused across steps."""

    def __init__(self, par, cfg):
        self.par = par
        self.cfg = cfg
        self.momentum = cfg.formulation == "momentum-m"

    def to_var(self, u):
        return spectral.helmholtz_apply(u) if self.momentum else u

    def to_u(self, y):
        return spectral.helmholtz_invert_spectral(y) if self.momentum else y

    def rhs(self, y, t):
        par, cfg = self.par, self.cfg
        if self.momentum:
            dy, u, ux = rhs_momentum(y, par, cfg.dealias, return_velocity=True)
        else:
            dy, ux = rhs_nonlocal(y, par, cfg.dealias, return_slope=True)
            u = y
        size = float(np.max(np.abs(u)) + np.max(np.abs(ux)))
        if not size <= cfg.max_value_guard:
            raise BreakdownError(
                f"sup|u| + sup|u_x| = {size:.6g} exceeds guard {cfg.max_value_guard:g} at t={t:.6g}",
                t=t,
                value=size,
            )
        return dy

    def advance(self, y, t, dt):
        k1 = self.rhs(y, t)
        k2 = self.rhs(y + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = self.rhs(y + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = self.rhs(y + dt * k3, t + dt)
        out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(out).all():
            raise NumericDomainError(f"non-finite state after step at t={t + dt:.6g}")
        return out


def step(s: State, par: Parameters, cfg: StepConfig) -> State:
    """Advance ``s`` by one RK4 step of size ``cfg.dt``.

    Raises:
        PreconditionError: ``dt`` violates the advective CFL bound.
        BreakdownError: a stage left the guarded region.
        NumericDomainError: a stage produced NaN or Inf.
    """
    _check_cfl(s.u, par, cfg.dt, cfg.cfl_limit)
    stepper = _Stepper(par, cfg)
    y = stepper.advance(stepper.to_var(s.u), s.t, cfg.dt)
    return State(s.t + cfg.dt, stepper.to_u(y))


@dataclass
class EvolveResult:
    """Outcome of :func:`evolve`.

    ``observations[j]`` holds the outputs of ``observers[j]`` in the order the
    states were observed; ``times`` holds the matching observation times.
    """

    final: State
    times: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    steps: int = 0
    breaking: bool = False
    t_break: float | None = None
    reason: str | None = None


def evolve(
    s0: State,
    par: Parameters,
    cfg: StepConfig,
    observers: Sequence[Callable[[State], object]] = (),
    stride: int = 1,
    frame_stride: int | None = None,
) -> EvolveResult:
    """Step from ``s0`` to ``cfg.t_end``.

    Observers run on the initial state, every ``stride`` steps and on the
    final state. With ``frame_stride`` set, solution snapshots are kept at
    that stride (plus the final one). A guard trip or non-finite value ends
    the run early with ``breaking`` set instead of raising. So does a CFL
    violation after the first step, with reason ``"cfl"``; on the first step
    it propagates as :class:`PreconditionError`.
    """
    if stride < 1 or (frame_stride is not None and frame_stride < 1):
        raise ValueError("strides must be positive")
    if not cfg.t_end > s0.t:
        raise ValueError(f"t_end={cfg.t_end!r} does not lie after the initial time {s0.t!r}")
    stepper = _Stepper(par, cfg)
    result = EvolveResult(final=s0, observations=[[] for _ in observers])
    n_steps = max(1, math.ceil(round((cfg.t_end - s0.t) / cfg.dt, 9)))

    def observe(state):
        result.times.append(state.t)
        for out, obs in zip(result.observations, observers):
            out.append(obs(state))

    observe(s0)
    if frame_stride is not None:
        result.frames.append(s0)

    y = stepper.to_var(s0.u)
    state = s0
    t0 = s0.t
    for k in range(1, n_steps + 1):
        t_prev = state.t
        t_next = cfg.t_end if k == n_steps else t0 + k * cfg.dt
        dt = t_next - t_prev
        try:
            _check_cfl(state.u, par, dt, cfg.cfl_limit)
        except PreconditionError as err:
            if k == 1:
                raise PreconditionError(f"step 1: {err}") from err
            result.breaking, result.t_break, result.reason = True, t_prev, "cfl"
            break
        try:
            y = stepper.advance(y, t_prev, dt)
            if k == n_steps:
                # the last state gets its own guard check since no later stage sees it
                stepper.rhs(y, t_next)
        except BreakdownError as err:
            err.step_index = k
            result.breaking, result.t_break, result.reason = True, err.t, "guard"
            break
        except NumericDomainError:
            result.breaking, result.t_break, result.reason = True, t_next, "non-finite"
            break
        state = State(t_next, stepper.to_u(y))
        result.steps = k
        last = k == n_steps
        if k % stride == 0 or last:
            observe(state)
        if frame_stride is not None and (k % frame_stride == 0 or last):
            result.frames.append(state)
    result.final = state
    return result
