"""Error taxonomy shared by all modules.

Exit-code mapping used by the CLI: ValidationError -> 2,
PrecisionError/UndecidedError -> 3, ParseError -> 4, InternalDefect -> 5.
"""


class TMotiveError(Exception):
    """Base class for all package errors."""


class ValidationError(TMotiveError):
    """Input violates a structural contract (NOT_NILPOTENT, size mismatch, ...)."""


class NotNilpotentError(ValidationError):
    """A_0 - theta*I is not nilpotent."""


class UnsupportedError(TMotiveError):
    """A computation the package deliberately refuses (UNSUPPORTED / NO_ALGORITHM)."""


class BadPrimeError(TMotiveError):
    """Reduction attempted at a prime where an entry is not integral or rank drops."""

    def __init__(self, message, reason="non-integral"):
        super().__init__(message)
        self.reason = reason


class PrecisionError(TMotiveError):
    """Working precision, exponent-denominator cap or field cap exhausted."""


class UnrepresentableError(PrecisionError):
    """A root or solution does not fit the fractional-exponent model at the caps."""


class NotDefinedError(TMotiveError):
    """A partial operation is undefined at this argument (Siegel action, NO_SIEGEL)."""


class ParseError(TMotiveError):
    """Malformed literal or definition file."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" at line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(message + loc)
        self.line = line
        self.column = column


class InternalDefect(TMotiveError):
    """An internal consistency check failed; indicates a bug, not a user error."""
