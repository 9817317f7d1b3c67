"""Custom exceptions for ngnboost."""

from typing import Optional, Sequence


class NgnBoostError(Exception):
    """Base exception for ngnboost."""


class ConfigError(NgnBoostError, ValueError):
    """Invalid configuration value or section."""


class DatasetError(NgnBoostError):
    """Dataset could not be loaded or violates its invariants."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        super().__init__(f"{message} ({', '.join(location)})" if location else message)
        self.row = row
        self.column = column


class SplitError(NgnBoostError):
    """Train/test split is infeasible."""


class DimensionMismatch(NgnBoostError):
    """Feature count does not match the fitted model."""


class SelectionError(NgnBoostError):
    """Feature selection request out of range."""


class FuzzyError(NgnBoostError):
    """Invalid fuzzy thresholds."""


class OptimizationError(NgnBoostError):
    """Objective returned a non-finite cost."""

    def __init__(self, message: str, position: Optional[Sequence[float]] = None):
        super().__init__(message if position is None else f"{message} at position {list(position)}")
        self.position = None if position is None else list(position)


class TrainingError(NgnBoostError):
    """Model training diverged."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message if iteration is None else f"{message} (iteration {iteration})")
        self.iteration = iteration


class RegistryError(NgnBoostError):
    """Classifier or selector already registered, or not registered."""


class ReportError(NgnBoostError):
    """Report artifacts could not be written or read."""
