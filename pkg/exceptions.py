"""
exceptions.py
Error types raised by the nilpotent quotient engine.
"""


class NqError(Exception):
    """Base class for all engine errors."""


class WordSyntaxError(NqError):
    """Malformed word or input file. Positions are 1-based."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")

    def at_line(self, line):
        return type(self)(self.message, line=line, column=self.column)


class UndeclaredSymbolError(WordSyntaxError):
    pass


class LawError(NqError):
    """A law without variables, or an assignment that misses a variable."""


class DimensionError(NqError, ValueError):
    pass


class CollectionLimitError(NqError):
    pass


class InconsistencyError(NqError):
    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class BudgetExceeded(NqError):
    """Time or memory budget ran out; ``partial`` is the last completed result."""

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)


class VerificationError(NqError):
    """A relator or law fails; ``partial`` is the failed result when one was built."""

    def __init__(self, message, counterexample=None, partial=None):
        self.counterexample = counterexample
        self.partial = partial
        super().__init__(message)


class UngradedPresentationError(NqError):
    pass


class TorsionDecompositionError(NqError):
    pass
