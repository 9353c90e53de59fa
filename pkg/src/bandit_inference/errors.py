"""Exception hierarchy for bandit-inference."""

from typing import Optional


class BanditInferenceError(Exception):
    """Base class for all library errors."""


class DomainError(BanditInferenceError, ValueError):
    """A probability or distribution parameter is outside its valid range."""


class DataIntegrityError(BanditInferenceError):
    """Logged data contradicts itself (e.g. an arm pulled with probability 0)."""


class CalibrationError(BanditInferenceError):
    """Critical values could not be derived from the simulated null distribution."""


class ConfigError(BanditInferenceError, ValueError):
    """Invalid run configuration or command-line value."""


class LogParseError(BanditInferenceError):
    """A trial-log CSV does not conform to the expected schema."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        """Initialize parse error.

        Args:
            message: Human readable description
            row: 1-based line number in the file (header is line 1)
            column: Offending column name
        """
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.row = row
        self.column = column


class CellFailure(BanditInferenceError):
    """A simulation cell raised while running."""

    def __init__(self, cell_label: str, cause: BaseException):
        super().__init__(f"cell {cell_label} failed: {cause}")
        self.cell_label = cell_label
        self.cause = cause
