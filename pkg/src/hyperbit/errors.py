"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HyperbitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidState(HyperbitError, ValueError):
    """Density matrix is not Hermitian, not PSD, or not unit trace."""


class InvalidObservable(HyperbitError, ValueError):
    """Observable is not Hermitian or its spectrum leaves [-1, 1]."""


class DimensionMismatch(HyperbitError, ValueError):
    pass


class NotProjective(HyperbitError, ValueError):
    """A projective (A^2 = 1) observable was required."""


class NonRealCorrelation(HyperbitError, ValueError):
    pass


class UnknownSetting(HyperbitError, KeyError):
    pass


class BiasedAlice(HyperbitError, ValueError):
    """Alice's observable has a nonzero expectation on the shared state."""


class ZeroProbabilityBranch(HyperbitError, ValueError):
    pass


class NonPSDGram(HyperbitError, ValueError):
    pass


class NormViolation(HyperbitError, ValueError):
    """A vector left the unit hyperball."""


class ExpectationOutOfRange(HyperbitError, ValueError):
    pass


class DegenerateDiscard(HyperbitError, ValueError):
    """Flip probability is undefined because Bob always discards (|y| = 1)."""


class InvalidFlipProbability(HyperbitError, ValueError):
    """Flip probability outside [0, 1]; the offending value is kept on ``q``."""

    def __init__(self, q: float, message: str | None = None):
        self.q = q
        super().__init__(message or f"flip probability q={q!r} is outside [0, 1]")


class Infeasible(HyperbitError, ValueError):
    """No convex post-processing strategy exists; ``violation`` is the excess."""

    def __init__(self, violation: float, message: str | None = None):
        self.violation = violation
        super().__init__(message or f"infeasible by {violation!r}")


class EmptyInterval(HyperbitError, ValueError):
    pass


class RejectionBudgetExceeded(HyperbitError, RuntimeError):
    pass


class NotFound(HyperbitError, LookupError):
    pass


class ConsistencyError(HyperbitError, ArithmeticError):
    """Two independent routes to the same quantity disagreed."""
