"""Custom exceptions for the K-center global solver."""

from typing import Optional


class KCenterError(Exception):
    """Base exception for K-center solver errors."""

    pass


class DatasetError(KCenterError):
    """Raised when a dataset cannot be loaded or is malformed."""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[int] = None
    ):
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f"{message} (row {row}, column {column})"
        elif row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)


class DimensionError(KCenterError, ValueError):
    """Raised when point and box dimensions do not match."""

    pass


class ConfigurationError(KCenterError):
    """Raised when solver configuration values are invalid."""

    pass


class InfeasibleProblemError(KCenterError):
    """Raised when the requested number of clusters cannot be served."""

    pass


class BudgetExceededError(KCenterError):
    """Raised when the brute-force oracle would exceed its evaluation budget."""

    pass


class NodeLimitError(KCenterError):
    """Raised when the open-node queue grows past its configured limit."""

    pass


class TerminalNodeError(KCenterError):
    """Raised when branching is requested on a terminal node."""

    pass


class UsageError(KCenterError):
    """Raised for invalid command-line arguments."""

    pass
