"""Exception hierarchy shared across the library.

The CLI maps these onto process exit codes: configuration and dimension
problems exit 1, data and model-file problems exit 2, numerical failures
exit 3.
"""


class NnrwError(Exception):
    """Base class for all library errors."""


class ConfigError(NnrwError):
    """Invalid configuration value or combination."""


class DimensionError(NnrwError):
    """Shapes of inputs disagree with the network or with each other."""


class DataError(NnrwError):
    """Dataset file is malformed, truncated, or fails validation."""


class ModelFormatError(DataError):
    """Model file has a bad magic, version, or payload."""


class NumericalError(NnrwError):
    """Factorization or decomposition failed."""
