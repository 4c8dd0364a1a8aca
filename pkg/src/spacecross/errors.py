"""Shared exception types."""

from .scalars import DegenerateInput

__all__ = [
    "DegenerateInput",
    "ValidationError",
    "NotDisjoint",
    "DegeneratePosition",
    "PreconditionViolated",
    "RetryExhausted",
]


class ValidationError(ValueError):
    """Malformed document or structurally invalid object."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class NotDisjoint(ValueError):
    """Two curves that must be disjoint share a point."""


class DegeneratePosition(ValueError):
    """Point configuration violates a general-position requirement."""


class PreconditionViolated(ValueError):
    """An operation's documented precondition does not hold."""


class RetryExhausted(RuntimeError):
    """A randomized procedure hit its defensive retry cap."""
