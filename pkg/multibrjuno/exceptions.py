"""
Exception hierarchy for multi-brjuno
"""
from typing import Optional


class MultiBrjunoError(Exception):
    """Base exception for multi-brjuno errors"""

    def __init__(self, message: str = "", *, depth: Optional[int] = None):
        super().__init__(message)
        self.depth = depth  # orbit depth at which the failure happened, if any


class ConfigurationError(MultiBrjunoError):
    """Raised when configuration is invalid"""
    pass


class InvalidInputError(MultiBrjunoError):
    """Raised when an input value or argument grammar is invalid"""
    pass


class PrecisionError(MultiBrjunoError):
    """Base class for failures of the adaptive-precision machinery"""
    pass


class PrecisionExhausted(PrecisionError):
    """Raised when a refinement hits the configured precision cap"""
    pass


class UndecidableAtPrecision(PrecisionError):
    """Raised when an enclosure keeps straddling a decision point at max precision"""
    pass


class DomainError(MultiBrjunoError):
    """Raised when a mathematical precondition is violated"""
    pass


class ExactTie(DomainError):
    """Raised on a certified tie (sign 0, half-integer, or equal branch values)"""
    pass


class SelectorFailed(DomainError):
    """Raised when the appendix word selector finds no admissible index"""
    pass


class CommutationViolated(DomainError):
    """Raised when germs expected to commute do not, within tolerance"""
    pass


class DegenerateLinearTerm(DomainError):
    """Raised when a series cannot be inverted (zero linear coefficient)"""
    pass


class SmallDivisorUnderflow(DomainError):
    """Raised when a small divisor falls below the hard floor"""
    pass
