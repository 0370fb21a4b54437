class DolfinError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(DolfinError, ValueError):
    pass


class DataError(DolfinError):
    """Malformed or missing input data."""

    def __init__(self, message: str, path=None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class CheckpointError(DataError):
    pass


class NumericError(DolfinError):
    pass


class DivergenceError(NumericError):
    pass


class UsageError(DolfinError):
    pass
