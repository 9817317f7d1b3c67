"""Accuracy, confusion matrices and the pooled classifier x selector results table."""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol

import numpy as np

from .exceptions import DimensionMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts, rows = true class, columns = predicted class."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.counts.sum()) if self.total else 0.0

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts)


def _check_lengths(predicted: np.ndarray, truth: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise DimensionMismatch(f"{predicted.shape[0]} predictions but {truth.shape[0]} labels")
    return predicted, truth


def accuracy(predicted: np.ndarray, truth: np.ndarray) -> float:
    predicted, truth = _check_lengths(predicted, truth)
    if truth.size == 0:
        return 0.0
    return float(np.count_nonzero(predicted == truth) / truth.size)


def confusion(predicted: np.ndarray, truth: np.ndarray, n_classes: int) -> ConfusionMatrix:
    predicted, truth = _check_lengths(predicted, truth)
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truth, predicted), 1)
    return ConfusionMatrix(counts)


class RunLike(Protocol):
    classifier: str
    selector: str
    fraction: float
    accuracy: Optional[float]

    @property
    def succeeded(self) -> bool: ...


@dataclass(frozen=True)
class CellStats:
    """Pooled statistics of one table cell."""

    mean: float
    std: float
    runs: int
    failed: int
    accuracies: tuple[float, ...] = field(repr=False, default=())


def _cell(outcomes: list[RunLike]) -> CellStats:
    accuracies = tuple(float(o.accuracy) for o in outcomes if o.succeeded)
    failed = sum(1 for o in outcomes if not o.succeeded)
    if not accuracies:
        return CellStats(mean=float("nan"), std=float("nan"), runs=0, failed=failed)
    values = np.asarray(accuracies)
    if np.ptp(values) == 0:
        mean, std = float(values[0]), 0.0
    else:
        mean, std = float(values.mean()), float(values.std())
    return CellStats(mean=mean, std=std, runs=len(accuracies), failed=failed, accuracies=accuracies)


@dataclass(frozen=True)
class ResultsTable:
    """Mean/std test accuracy per (classifier, selector), pooled over seeds x fractions."""

    classifiers: tuple[str, ...]
    selectors: tuple[str, ...]
    fractions: tuple[float, ...]
    cells: dict[tuple[str, str], CellStats]
    by_fraction: dict[tuple[str, str, float], CellStats]

    @classmethod
    def aggregate(
        cls,
        outcomes: Iterable[RunLike],
        classifiers: tuple[str, ...],
        selectors: tuple[str, ...],
        fractions: tuple[float, ...],
    ) -> "ResultsTable":
        """Group outcomes by cell; the result does not depend on outcome order."""
        grouped: dict[tuple[str, str], list[RunLike]] = {(c, s): [] for c in classifiers for s in selectors}
        per_fraction: dict[tuple[str, str, float], list[RunLike]] = {
            (c, s, f): [] for c in classifiers for s in selectors for f in fractions
        }
        for outcome in sorted(outcomes, key=lambda o: getattr(o, "run_id", "")):
            grouped.setdefault((outcome.classifier, outcome.selector), []).append(outcome)
            per_fraction.setdefault((outcome.classifier, outcome.selector, outcome.fraction), []).append(outcome)
        return cls(
            classifiers=classifiers,
            selectors=selectors,
            fractions=fractions,
            cells={key: _cell(runs) for key, runs in grouped.items()},
            by_fraction={key: _cell(runs) for key, runs in per_fraction.items()},
        )

    def cell(self, classifier: str, selector: str) -> CellStats:
        return self.cells[(classifier, selector)]
