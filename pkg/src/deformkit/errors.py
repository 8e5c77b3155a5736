"""Exception types shared across the package."""

__all__ = [
    "DeformkitError",
    "SingularError",
    "NotSelfAdjointError",
    "NotHomomorphismError",
    "OrderTooHighError",
    "DecayViolationError",
    "GridMismatchError",
    "BoxMismatchError",
    "ConvergenceError",
    "NoConvergenceError",
    "DivideByZeroError",
    "UnsupportedOperatorError",
]


class DeformkitError(Exception):
    """Base class for all package-specific errors."""


class SingularError(DeformkitError):
    """Inversion requested for an element that is singular or too ill-conditioned."""


class NotSelfAdjointError(DeformkitError):
    """Functional calculus requested for a non self-adjoint element."""


class NotHomomorphismError(DeformkitError):
    """A map claimed to be a *-homomorphism fails the basis checks."""


class OrderTooHighError(DeformkitError):
    """Derivative order exceeds the supported maximum."""


class DecayViolationError(DeformkitError):
    """Grid data does not decay enough at the box boundary for the operation."""


class GridMismatchError(DeformkitError):
    """Two grid objects do not share the same geometry."""


class BoxMismatchError(DeformkitError):
    """Two symbols do not live on the same box or have incompatible matrix sizes."""


class ConvergenceError(DeformkitError):
    """Two evaluation routes disagree beyond the allowed tolerance."""


class NoConvergenceError(DeformkitError):
    """An iteration failed to converge within its iteration budget."""


class DivideByZeroError(DeformkitError):
    """A ratio was requested whose denominator vanishes while the numerator does not."""


class UnsupportedOperatorError(DeformkitError):
    """The operator does not carry the structure the operation requires."""
