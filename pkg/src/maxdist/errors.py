"""Exception types raised by the toolkit."""


class MaxdistError(Exception):
    """Base class for all toolkit errors."""


class PreconditionError(MaxdistError, ValueError):
    """An input violates an operation's precondition.

    ``guard`` names the violated condition so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, message, guard="precondition"):
        super().__init__(message)
        self.guard = guard


class DegenerateLimitError(PreconditionError):
    """No non-degenerate affine normalization exists for the request."""

    def __init__(self, message, guard="degenerate-limit"):
        super().__init__(message, guard)
