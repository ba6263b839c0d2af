"""Pseudospectral solver and property audits for the periodic b-family

    u_t - u_txx + (b+c) u^p u_x = b u^(p-1) u_x u_xx + c u^p u_xxx

on the unit circle.
"""

from .equation import Parameters, State, rhs_momentum, rhs_nonlocal
from .errors import (
    BreakdownError,
    ConstraintViolation,
    FlowDegeneracyError,
    NumericDomainError,
    PreconditionError,
)
from .initdata import InitSpec, build
from .integrator import StepConfig, evolve, step
from .spectral import Grid

__all__ = [
    "BreakdownError",
    "ConstraintViolation",
    "FlowDegeneracyError",
    "Grid",
    "InitSpec",
    "NumericDomainError",
    "Parameters",
    "PreconditionError",
    "State",
    "StepConfig",
    "build",
    "evolve",
    "rhs_momentum",
    "rhs_nonlocal",
    "step",
]
__version__ = "0.1.0"
