"""Exception types raised across the package."""


class LWError(Exception):
    """Base class for package errors."""


class PoleError(LWError, ValueError):
    """A Gamma function argument hit (or came too close to) a pole."""


class DomainError(LWError, ValueError):
    """An argument lies outside the documented domain."""


class UnsupportedRank(LWError, ValueError):
    """The requested rank has no calibrated implementation."""


class DegenerateParameters(LWError, ValueError):
    """Spectral parameters with coincident alpha entries."""


class ContourTruncationError(LWError, RuntimeError):
    """A truncated line integral's tail estimate exceeds its budget."""


class ConvergenceError(LWError, RuntimeError):
    """A quadrature did not reach its requested accuracy."""


class TailBudgetExceeded(ConvergenceError):
    """The computed truncation tail bound is larger than allowed."""

    def __init__(self, message, tail_bound=None):
        super().__init__(message)
        self.tail_bound = tail_bound


class BudgetExceeded(ConvergenceError):
    """Refinement ran out of budget before reaching the tolerance."""

    def __init__(self, message, value=None, achieved_error=None):
        super().__init__(message)
        self.value = value
        self.achieved_error = achieved_error


class BoundaryError(LWError, ValueError):
    """Evaluation at a point where the closed form is discontinuous."""


class UsageError(LWError, ValueError):
    """Invalid command-line configuration."""
