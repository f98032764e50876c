"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed graph or matrix input; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to converge."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size cap."""


class DegenerateStationaryError(RuntimeError):
    """The stationary state is not unique; reports the null-space multiplicity."""

    def __init__(self, multiplicity):
        super().__init__(
            f"null space has dimension {multiplicity}; stationary state is not unique"
        )
        self.multiplicity = multiplicity
