"""Exception hierarchy shared by all zswarm modules."""


class SwarmError(Exception):
    """Base class for every error raised by zswarm."""


class ConstructionError(SwarmError, ValueError):
    """A value type was built from arguments that violate its invariants."""


class ConfigError(SwarmError, ValueError):
    """A simulation configuration is invalid.

    ``key`` names the offending configuration key when one is known.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class UsageError(SwarmError, RuntimeError):
    """An operation was called in a state where it is not allowed."""


class BoundError(SwarmError, ValueError):
    """An exhaustive exploration was asked to exceed its state-space guard."""
