"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates an operation's preconditions."""


class ValidationError(ValueError):
    """A config or data file is malformed or inconsistent."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its sweep budget."""

    def __init__(self, message, last_delta=None):
        super().__init__(message)
        self.last_delta = last_delta


class NumericError(RuntimeError):
    """A computation produced non-finite or degenerate values."""


class CapacityError(RuntimeError):
    """A requested enumeration exceeds the configured size cap."""
