"""Exception types shared across the package."""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed generating-function source.

    ``offset`` is a byte offset into the UTF-8 encoded source and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, offset: int, message: str, expected=()):
        self.offset = offset
        self.message = message
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"offset {offset}: {message}{detail}")


class EvaluationError(ArithmeticError):
    """Division by (numerically) zero or a non-finite result during evaluation."""


class ConstructionError(ValueError):
    """A generating function, family or grid violates its invariants."""


class DomainTooSmallError(ConstructionError):
    """Wavefunctions have not decayed at the boundary of the grid."""


class SingularShiftError(ArithmeticError):
    """Shifted tridiagonal system stayed singular after the imaginary-offset retry."""


class ConvergenceError(ArithmeticError):
    """An iterative solve did not reach its tolerance."""
