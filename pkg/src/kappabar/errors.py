"""Exception hierarchy shared by every kappabar module."""

from __future__ import annotations


class KappaError(Exception):
    """Base class for all errors raised by kappabar."""


class ParseError(KappaError):
    """Malformed formula, database or query text.

    ``line`` and ``column`` are 1-based; ``line`` is None when parsing a lone
    formula rather than a file.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is None and self.column is None:
            return self.message
        if self.line is None:
            return f"column {self.column}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


class VocabularyMismatch(KappaError):
    """A formula mentions an atom outside the vocabulary it is evaluated over."""


class VocabularyTooLarge(KappaError):
    """Enumeration was requested over more atoms than the configured cap."""


class InconsistentDatabase(KappaError):
    """The operation requires a consistent defaults database.

    ``residual`` holds the defaults left over when toleration got stuck.
    """

    def __init__(self, message: str, residual=()):
        super().__init__(message)
        self.residual = tuple(residual)


class FixpointGuardExceeded(KappaError):
    """Fixpoint iteration did not settle within its sweep budget (a bug, not bad input)."""
