"""Run configuration: a flat ``section.key = value`` text format.

Grammar, one entry per line::

    # comment (also allowed after a value)
    equation.b = 2.0
    init.kind  = momentum-first

Blank lines are ignored. Keys are the dotted names in :data:`SCHEMA`; an
unknown, duplicated or malformed key is an error naming the offending line.
Booleans accept ``true/false/yes/no/on/off/1/0``. Every key except
``equation.b``, ``equation.c`` and ``equation.p`` has a default.
"""

import math
from dataclasses import dataclass

from . import spectral
from .equation import Parameters
from .initdata import KINDS, SIGNS, InitSpec
from .integrator import FORMULATIONS, StepConfig

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}
_REQUIRED = object()


class ConfigError(ValueError):
    """Invalid configuration; the message names the field."""


def _bool(text):
    low = text.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}; got {text!r}")
        return text

    return parse


SCHEMA = {
    "equation.b": (_float, _REQUIRED),
    "equation.c": (_float, _REQUIRED),
    "equation.p": (_int, _REQUIRED),
    "grid.n": (_int, 256),
    "step.dt": (_float, 1e-4),
    "step.t_end": (_float, 1.0),
    "step.formulation": (_choice(FORMULATIONS), "nonlocal-u"),
    "step.cfl_limit": (_float, 0.5),
    "step.max_value_guard": (_float, 1e6),
    "step.dealias": (_bool, True),
    "init.kind": (_choice(KINDS), "fourier-modes"),
    "init.offset": (_float, 0.0),
    "init.amplitude": (_float, 1.0),
    "init.mode": (_int, 1),
    "init.phase": (_float, 0.0),
    "init.center": (_float, 0.5),
    "init.width": (_float, 0.05),
    "init.sign": (_choice(SIGNS), "none"),
    "init.random_modes": (_int, 0),
    "init.seed": (_int, 0),
    "observe.stride": (_int, 100),
    "output.frames": (_bool, True),
    "checks.conservation": (_bool, True),
    "checks.identity": (_bool, True),
    "checks.sign": (_bool, False),
    "checks.characteristics": (_bool, False),
    "checks.growth": (_bool, False),
    "checks.ux_bound": (_bool, False),
    "checks.continuation": (_bool, False),
    "characteristics.seeds": (_int, 64),
    "characteristics.dt": (_float, 2e-4),
    "characteristics.frame_stride": (_int, 1),
    "continuation.a": (_float, 0.0),
    "continuation.b": (_float, 0.2),
    "breaking.threshold": (_float, 1e6),
    "tol.drift": (_float, 1e-8),
    "tol.l1": (_float, 1e-7),
    "tol.identity": (_float, 1e-10),
    "tol.sign": (_float, 1e-6),
    "tol.flow": (_float, 1e-5),
    "tol.jac": (_float, 1e-6),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration. ``values`` maps every schema key to its resolved value."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @property
    def parameters(self) -> Parameters:
        v = self.values
        return Parameters(v["equation.b"], v["equation.c"], v["equation.p"])

    @property
    def grid(self) -> spectral.Grid:
        return spectral.Grid(self.values["grid.n"])

    @property
    def step(self) -> StepConfig:
        v = self.values
        return StepConfig(
            dt=v["step.dt"],
            t_end=v["step.t_end"],
            formulation=v["step.formulation"],
            cfl_limit=v["step.cfl_limit"],
            max_value_guard=v["step.max_value_guard"],
            dealias=v["step.dealias"],
        )

    @property
    def init(self) -> InitSpec:
        kw = {k.split(".", 1)[1]: val for k, val in self.values.items() if k.startswith("init.")}
        return InitSpec(**kw)

    def echo(self):
        """Resolved values in schema order (JSON-serializable)."""
        return {key: self.values[key] for key in SCHEMA}

    def to_text(self):
        out = []
        for key in SCHEMA:
            val = self.values[key]
            if isinstance(val, bool):
                val = "true" if val else "false"
            elif isinstance(val, float):
                val = repr(val)
            out.append(f"{key} = {val}")
        return "\n".join(out) + "\n"


def parse_text(text, source="<config>") -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        ConfigError: syntax, unknown key, bad value or a failed cross-field check.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source}:{lineno}"
        if "=" not in body:
            raise ConfigError(f"{where}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{where}: {key}: missing value")
        try:
            raw[key] = SCHEMA[key][0](value)
        except ValueError as err:
            raise ConfigError(f"{where}: {key}: {err}") from None
    return from_values(raw)


def from_values(raw) -> RunConfig:
    """Fill defaults into ``raw`` (already typed) and validate."""
    values = {}
    for key, (_, default) in SCHEMA.items():
        if key in raw:
            values[key] = raw[key]
        elif default is _REQUIRED:
            raise ConfigError(f"{key}: required")
        else:
            values[key] = default
    unknown = set(raw) - set(SCHEMA)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig(values)
    _validate(cfg)
    return cfg


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_text(text, source=str(path))


def _field(prefix, build):
    try:
        return build()
    except (ValueError, TypeError) as err:
        raise ConfigError(f"{prefix}: {err}") from None


def _validate(cfg):
    v = cfg.values
    par = _field("equation", lambda: cfg.parameters)
    _field("grid.n", lambda: cfg.grid)
    _field("step", lambda: cfg.step)
    _field("init", lambda: cfg.init)
    for key in ("observe.stride", "characteristics.seeds", "characteristics.frame_stride"):
        if v[key] < 1:
            raise ConfigError(f"{key}: must be a positive integer, got {v[key]}")
    for key in ("characteristics.dt", "breaking.threshold") + tuple(k for k in SCHEMA if k.startswith("tol.")):
        if not v[key] > 0:
            raise ConfigError(f"{key}: must be positive, got {v[key]}")
    if v["init.random_modes"] and not v["init.random_modes"] < v["grid.n"] // 2:
        raise ConfigError(f"init.random_modes: must be below grid.n / 2 = {v['grid.n'] // 2}")
    zero_b = par.p == 1 and par.b == 0.0
    for key in ("checks.growth", "checks.ux_bound"):
        if v[key] and not zero_b:
            raise ConfigError(f"{key}: requires equation.p = 1 and equation.b = 0")
    if v["checks.continuation"]:
        if not (par.is_H1 or par.is_H2):
            raise ConfigError("checks.continuation: requires p = 1 with 0 <= b <= 3c, or b = p c")
        if not 0.0 <= v["continuation.a"] < v["continuation.b"] <= 1.0:
            raise ConfigError("continuation.a, continuation.b: need 0 <= a < b <= 1")
