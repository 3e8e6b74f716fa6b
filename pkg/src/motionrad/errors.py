"""Exceptions and warnings raised by motionrad."""


class MotionRadError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MotionRadError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class ConvergenceFailure(MotionRadError, ArithmeticError):
    """Adaptive integration stopped before reaching the requested tolerance.

    The partial ``value`` and its ``error_estimate`` are kept on the exception
    so callers can decide whether the result is still usable.
    """

    def __init__(self, message, value=float("nan"), error_estimate=float("inf"), subdivisions=0):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.subdivisions = subdivisions


class UnsupportedRegime(MotionRadError):
    """The requested method is not valid for these parameters."""


class PeakUnresolved(MotionRadError):
    """A sampling grid is too coarse to resolve a peak's half-width."""


class RegimeWarning(UserWarning):
    """Parameters leave the regime where the approximations are reliable."""
