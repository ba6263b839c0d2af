"""Execute one configured run and write its artifacts.

Layout of the output directory::

    invariants.csv   header plus one row per observation, 17 significant digits
    frames/          frame_<index>.txt, one per observation: "t=<t> n=<n>" then n samples
    summary.json     status, breaking, drifts, residuals, checks, config_echo
"""

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import characteristics as chars
from . import diagnostics as diag
from . import initdata, spectral
from .config import RunConfig
from .equation import State
from .errors import FlowDegeneracyError, PreconditionError
from .integrator import evolve

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BREAKDOWN, EXIT_IO = 0, 1, 2, 3, 4


def fmt(x) -> str:
    return "%.17g" % x


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def write_frame(path, state: State):
    lines = [f"t={fmt(state.t)} n={state.u.shape[0]}"]
    lines += [fmt(v) for v in state.u]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_frame(path):
    """Inverse of :func:`write_frame`; returns ``(t, u)``."""
    lines = Path(path).read_text(encoding="utf-8").split()
    t = float(lines[0].split("=", 1)[1])
    n = int(lines[1].split("=", 1)[1])
    u = np.array([float(v) for v in lines[2:]])
    if u.shape[0] != n:
        raise ValueError(f"{path}: header says n={n} but found {u.shape[0]} samples")
    return t, u


def write_csv(path, series):
    rows = [",".join(diag.CSV_COLUMNS)]
    rows += [",".join(fmt(v) for v in r.csv_row()) for r in series]
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def read_csv(path):
    """Rows of an ``invariants.csv`` as dicts of floats."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    head = lines[0].split(",")
    return [dict(zip(head, map(float, line.split(",")))) for line in lines[1:]]


@dataclass
class RunOutcome:
    summary: dict
    exit_code: int
    series: list
    final: State


def _check_conservation(series, par, cfg):
    drifts = diag.drift(series, par)
    tol = cfg["tol.drift"]
    return {"passed": all(d < tol for d in drifts.values()), "tolerance": tol, "drifts": drifts}


def _check_identity(series, par, cfg):
    if not (par.p == 1 or par.is_H2):
        return {"passed": True, "applicable": False}
    worst = max(r.eq606_residual for r in series)
    return {"passed": worst < cfg["tol.identity"], "applicable": True, "max_residual": worst, "tolerance": cfg["tol.identity"]}


def _check_sign(series, par, cfg, m0):
    try:
        sc = diag.sign_check(series, m0, cfg["tol.sign"])
    except PreconditionError as err:
        return {"passed": False, "error": str(err)}
    out = {"passed": sc.passed, "sign": sc.sign, "min_m": sc.min_m, "min_u": sc.min_u, "max_m": sc.max_m, "max_u": sc.max_u}
    if par.conserves_mean:
        l1 = diag.l1_drift(series)
        out["L1_u_drift"] = l1
        out["passed"] = sc.passed and l1 < cfg["tol.l1"]
    return out


def _check_characteristics(result, par, cfg, m0):
    frames = chars.FrameSeries.from_states(result.frames)
    n_seeds = cfg["characteristics.seeds"]
    seeds = (np.arange(n_seeds) + 0.5) / n_seeds
    t_final = result.final.t
    try:
        traj = chars.TrajectorySet.seeded(seeds, frames, par)
        traj = chars.integrate_flow(traj, frames, par, cfg["characteristics.dt"], t_final)
    except FlowDegeneracyError as err:
        return {"passed": False, "error": str(err)}, {}
    m = result.final.m
    flow = chars.flow_conservation_residual(traj, m, m0, par)
    flow_q = chars.flow_conservation_residual(traj, m, m0, par, quadrature=True)
    jq = traj.jac_quadrature
    gap = float(np.max(np.abs(traj.jac - jq)) / np.max(np.abs(traj.jac)))
    positive = bool(np.all(traj.jac > 0))
    ordered = chars.ordering_preserved(traj)
    passed = flow < cfg["tol.flow"] and gap < cfg["tol.jac"] and positive and ordered
    check = {
        "passed": passed,
        "seeds": n_seeds,
        "t": t_final,
        "min_jacobian": float(np.min(traj.jac)),
        "jacobians_positive": positive,
        "ordering_preserved": ordered,
        "frame_spacing_ok": frames.max_spacing_ok(par.c, par.p),
    }
    return check, {"flow": flow, "flow_quadrature": flow_q, "jacobian_gap": gap}


def _check_growth(series, par):
    if len(series) < 3:
        return {"passed": False, "error": "growth check needs at least three observations"}, {}
    g = diag.growth_envelope_check(series, par)
    check = {
        "passed": g.passed,
        "identity_ok": g.identity_ok,
        "envelope_ok": g.envelope_ok,
        "fitted_rate": g.fitted_rate,
        "bound_rate": g.bound_rate,
        "C2": g.C2,
    }
    return check, {"dI_identity": g.identity_residual}


def _check_ux_bound(series, par, m0):
    try:
        b = diag.ux_bound_check(series, m0, par)
    except PreconditionError as err:
        return {"passed": False, "error": str(err)}
    return {"passed": b.passed, "observed_K": b.observed_K, "bound": b.bound, "C1": b.C1}


def _check_continuation(state, par, cfg):
    rec = diag.continuation_probe(state, par, (cfg["continuation.a"], cfg["continuation.b"]))
    return {
        "passed": rec.implication_holds,
        "t": state.t,
        "window": list(rec.window),
        "window_max_u": rec.window_max_u,
        "F_jump": rec.F_jump,
        "window_integral": rec.window_integral,
        "global_max_u": rec.global_max_u,
        "threshold": rec.threshold,
    }


def execute(cfg: RunConfig, out_dir, log=print) -> RunOutcome:
    """Run ``cfg`` and write artifacts below ``out_dir``.

    Raises:
        OSError: the output directory is not writable.
        PreconditionError: the first step already violates the CFL bound.
    """
    out = Path(out_dir)
    frame_dir = out / "frames"
    frame_dir.mkdir(parents=True, exist_ok=True)
    par, grid, step_cfg = cfg.parameters, cfg.grid, cfg.step
    u0, meta = initdata.build_with_metadata(cfg.init, grid)
    m0 = spectral.helmholtz_apply(u0)
    s0 = State(0.0, u0)
    if meta["stress_test"]:
        log("warning: peakon-profile data lies below the smooth solution class; treat results as a stress test")

    n_obs = [0]

    def observe(state):
        rep = diag.report(state, par, step_cfg.dealias)
        if cfg["output.frames"]:
            write_frame(frame_dir / f"frame_{n_obs[0]:06d}.txt", state)
        n_obs[0] += 1
        return rep

    want_chars = cfg["checks.characteristics"]
    result = evolve(
        s0,
        par,
        step_cfg,
        observers=(observe,),
        stride=cfg["observe.stride"],
        frame_stride=cfg["characteristics.frame_stride"] if want_chars else None,
    )
    if result.breaking:
        log(f"breakdown ({result.reason}) at t={result.t_break:.6g}")
    series = diag.with_identity_residuals(result.observations[0])
    write_csv(out / "invariants.csv", series)

    monitor = diag.breaking_monitor(series, cfg["breaking.threshold"])
    breaking = {
        "detected": result.breaking or monitor.status == "guard-tripped",
        "reason": result.reason,
        "t_break": result.t_break,
        "monitor": monitor.status,
        "t_star": monitor.t_star,
        "S_max": monitor.S_max,
        "threshold": cfg["breaking.threshold"],
        "guard": step_cfg.max_value_guard,
        "steps_completed": result.steps,
        "t_reached": result.final.t,
    }
    checks, residuals = {}, {}
    if par.p == 1 or par.is_H2:
        residuals["identity_max"] = max(r.eq606_residual for r in series)
    if cfg["checks.conservation"]:
        checks["conservation"] = _check_conservation(series, par, cfg)
    if cfg["checks.identity"]:
        checks["identity"] = _check_identity(series, par, cfg)
    if cfg["checks.sign"]:
        checks["sign"] = _check_sign(series, par, cfg, m0)
    if want_chars and not result.breaking:
        checks["characteristics"], res = _check_characteristics(result, par, cfg, m0)
        residuals.update(res)
    if cfg["checks.growth"]:
        checks["growth"], res = _check_growth(series, par)
        residuals.update(res)
    if cfg["checks.ux_bound"]:
        checks["ux_bound"] = _check_ux_bound(series, par, m0)
    if cfg["checks.continuation"]:
        checks["continuation"] = _check_continuation(result.final, par, cfg)

    if breaking["detected"]:
        status, code = "breakdown", EXIT_BREAKDOWN
    elif all(c["passed"] for c in checks.values()):
        status, code = "pass", EXIT_PASS
    else:
        status, code = "fail", EXIT_FAIL
    summary = {
        "status": status,
        "breaking": breaking,
        "drifts": diag.drift(series, par),
        "residuals": residuals,
        "checks": checks,
        "config_echo": cfg.echo(),
    }
    summary = _jsonable(summary)
    tmp = out / "summary.json.tmp"
    tmp.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, out / "summary.json")
    return RunOutcome(summary, code, series, result.final)
