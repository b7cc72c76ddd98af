"""Exception types shared across the simulator."""


class UsageError(ValueError):
    """A caller passed arguments outside an operation's contract."""


class ConfigError(ValueError):
    """Invalid configuration file or configuration value."""


class TraceFormatError(ValueError):
    """Malformed trace text. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class InvariantViolation(RuntimeError):
    """Internal consistency check failed; indicates a simulator bug."""
