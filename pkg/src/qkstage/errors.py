"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A structurally invalid configuration value (bad dimension, enum, range)."""


class ParseError(ValueError):
    """A malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(RuntimeError):
    """The dual solver exhausted its iteration budget."""

    def __init__(self, message: str, worst_violation: float):
        self.message = message
        self.worst_violation = worst_violation
        super().__init__(f"{message} (worst KKT violation {worst_violation:.3e})")
