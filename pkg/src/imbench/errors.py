"""Exception types shared across the package."""


class ImbenchError(Exception):
    """Base class for all errors raised by imbench."""


class ParseError(ImbenchError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ResourceCapError(ImbenchError):
    """An instance exceeds a configured size or memory cap."""


class AlgorithmError(ImbenchError):
    """A seed-selection algorithm failed while running under the harness."""
