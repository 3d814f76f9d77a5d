"""Exception hierarchy.

``UsageError`` subclasses map to CLI exit code 2, ``DomainError`` subclasses
to exit code 1.
"""

from __future__ import annotations


class CombSpeciesError(Exception):
    pass


class UsageError(CombSpeciesError):
    pass


class DomainError(CombSpeciesError):
    pass


class SpecSyntaxError(UsageError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SpecError(UsageError):
    """Semantically invalid specification (duplicate or unknown name, ...)."""


class CompositionUndefined(DomainError):
    """A non-polynomial constructor received a series with nonzero constant term."""


class NotWellFounded(DomainError):
    def __init__(self, report):
        super().__init__(f"system is not well founded: {report.reason}")
        self.report = report


class NonConvergence(DomainError):
    pass


class SingularLinearSystem(DomainError):
    pass


class CycDivergent(DomainError):
    pass


class ZeroConstantTerm(DomainError):
    pass


class RingMismatch(DomainError):
    pass


class InfiniteConstantTerm(DomainError):
    """An unbounded constructor applied to size-0 structures yields infinitely many of them."""


class UnsupportedOperation(DomainError):
    """The requested evaluation is outside what the library implements."""
