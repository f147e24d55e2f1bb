"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2,
DataValidationError (and ParseError) -> 3, NumericError -> 4.
"""


class KnowcageError(Exception):
    """Base class for all package errors."""


class ConfigError(KnowcageError):
    """Invalid configuration value or combination."""


class DataValidationError(KnowcageError):
    """Input data violates a documented contract."""


class ParseError(DataValidationError):
    """Malformed input file; message carries the 1-based line number."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class NumericError(KnowcageError):
    """Numeric failure during model construction or training."""


class DimensionError(NumericError):
    """Operand shapes are incompatible; message names both shapes."""
