"""Exception hierarchy shared by every module."""


class TorsorForgeError(Exception):
    """Base class for all library errors."""


class InvariantError(TorsorForgeError):
    """A structural invariant failed (bad table, non-morphism, bad cocycle...)."""


class CapacityError(TorsorForgeError):
    """A search would exceed its configured budget or a documented size bound."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class OracleMismatch(TorsorForgeError):
    """Two independent routes to the same classification disagreed."""
