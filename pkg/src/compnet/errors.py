"""Shared exception types."""


class GuardExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured size guard."""


class ConfigError(ValueError):
    """A user-supplied configuration value is invalid."""
