# parallel-cfs/tools/errors.py


class CfsError(RuntimeError):
    """Base class for every error raised by the selection engine."""


class DataError(CfsError):
    """Input data cannot be read or violates a dataset invariant."""


class UnreadableFileError(DataError):
    pass


class RaggedRowError(DataError):
    def __init__(self, path, line: int, expected: int, found: int):
        super().__init__(
            f"{path}: line {line} has {found} fields, expected {expected}"
        )
        self.line = line
        self.expected = expected
        self.found = found


class MissingClassColumnError(DataError):
    pass


class InvalidClassError(DataError):
    pass


class DimensionError(DataError):
    """Index or table shape outside what the dataset allows."""


class ConfigError(CfsError):
    pass


class InvariantError(CfsError):
    """An internal invariant was violated; this is a bug, not bad input."""


class EmptyClassError(InvalidClassError):
    """The class column has no non-missing value at all."""
