"""Exception types raised across the package."""


class NumericDomainError(FloatingPointError):
    """A field contains NaN or Inf, either on input or after an operation."""


class PreconditionError(ValueError):
    """An operation was called outside the regime it is defined for."""


class ConstraintViolation(ValueError):
    """Constructed data breaks a constraint it was requested to satisfy."""


class BreakdownError(RuntimeError):
    """The solution left the guarded region during a time step.

    Attributes:
        t: time of the stage at which the guard tripped.
        step_index: index of the step being taken, if known.
        value: the offending ``sup|u| + sup|u_x|``.
    """

    def __init__(self, message, t, value=None, step_index=None):
        super().__init__(message)
        self.t = t
        self.value = value
        self.step_index = step_index


class FlowDegeneracyError(RuntimeError):
    """A characteristic Jacobian became non-positive."""

    def __init__(self, message, t):
        super().__init__(message)
        self.t = t
