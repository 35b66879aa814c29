"""
Exception hierarchy for the fockbundle package.

Every error raised by the library derives from FockBundleError and from the
closest builtin, so callers may catch either.
"""
from typing import Any, Dict, Optional


class FockBundleError(Exception):
    """Base class of all library errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': type(self).__name__,
            'message': str(self),
            'details': self.details,
        }


class ParameterError(FockBundleError, ValueError):
    """Invalid dimensions, cutoffs, parity or malformed input."""


class SpaceMismatchError(FockBundleError, ValueError):
    """Operands live on different or incompatible mode spaces."""


class InvariantViolationError(FockBundleError, ValueError):
    """An input fails a structural invariant beyond tolerance."""

    def __init__(self, message: str, residual: float, tolerance: float, **details: Any):
        super().__init__(
            f"{message} (residual {residual:.3e} > tolerance {tolerance:.1e})",
            {'residual': float(residual), 'tolerance': float(tolerance), **details},
        )
        self.residual = float(residual)
        self.tolerance = float(tolerance)


class MembershipError(InvariantViolationError):
    """A vector lies outside the subspace an operator requires."""


class NumericalDegeneracyError(FockBundleError, ArithmeticError):
    """A solve is singular or ill-conditioned; ``details`` holds the report."""

    @property
    def report(self) -> Dict[str, Any]:
        return self.details


class PreconditionError(FockBundleError, ValueError):
    """An operation was called outside its precondition."""


class FockDimensionError(FockBundleError, MemoryError):
    """The Fock space would exceed the configured dimension guard."""


class ResolutionError(FockBundleError, ArithmeticError):
    """Discretization too coarse for the requested accuracy."""
