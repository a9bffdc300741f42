"""Exception types shared across the package.

The CLI maps each class onto a distinct exit code, so library code raises
these instead of returning status flags.
"""


class TudimError(Exception):
    """Base class for all package errors."""


class InputError(TudimError, ValueError):
    """Malformed input: wrong shapes, violated preconditions, bad files."""


class BudgetExceeded(TudimError):
    """An exponential enumeration hit its configured ceiling.

    ``progress`` carries whatever partial result the caller can still report.
    """

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = progress or {}


class UnboundedError(InputError):
    """A polyhedron that must be bounded is not; ``ray`` is a witness direction."""

    def __init__(self, message, ray=None):
        super().__init__(message)
        self.ray = ray


class InternalAssertion(TudimError, AssertionError):
    """A constructed object failed a check that a theorem guarantees."""
