"""Exception hierarchy shared by all modules."""


class QSeriesError(Exception):
    """Base class for every error raised by this package."""


class UsageError(QSeriesError, ValueError):
    """Bad arguments: unknown names, out-of-range parameters."""


class PrecisionError(QSeriesError):
    """A requested horizon is unavailable or exceeds the configured cap."""


class HorizonError(PrecisionError):
    """An input series does not reach the horizon an operation needs."""


class IntegralityError(QSeriesError, ArithmeticError):
    """An operation would leave the integers (non-unit leading term, inexact division)."""


class StructuralError(QSeriesError):
    """A structural invariant of the construction failed (degrees, cross-checks)."""


class CertificationError(QSeriesError):
    """A series identity failed to hold; ``witness`` describes the first mismatch."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class PreconditionError(UsageError):
    """Inputs do not meet an operation's stated precondition (e.g. a table too short)."""
