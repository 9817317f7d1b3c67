"""Tests for accuracy, confusion matrices and the results table."""

import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pytest

from ngnboost.exceptions import DimensionMismatch
from ngnboost.metrics import ConfusionMatrix, ResultsTable, accuracy, confusion


@dataclass(frozen=True)
class Run:
    classifier: str
    selector: str
    fraction: float
    accuracy: Optional[float]
    seed: int = 0

    @property
    def run_id(self) -> str:
        return f"{self.classifier}/{self.selector}/seed={self.seed}/fraction={self.fraction:g}"

    @property
    def succeeded(self) -> bool:
        return self.accuracy is not None


class TestAccuracy:
    """Test accuracy and confusion counts."""

    @pytest.mark.unit
    def test_accuracy(self):
        assert accuracy(np.array([0, 1, 2, 2]), np.array([0, 1, 1, 2])) == 0.75

    @pytest.mark.unit
    def test_empty(self):
        assert accuracy(np.array([], dtype=int), np.array([], dtype=int)) == 0.0

    @pytest.mark.unit
    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            accuracy(np.array([0, 1]), np.array([0]))

    @pytest.mark.unit
    def test_confusion_counts(self):
        """Rows are true classes, columns predicted classes."""
        matrix = confusion(np.array([0, 1, 2, 2]), np.array([0, 1, 1, 2]), 3)

        np.testing.assert_array_equal(matrix.counts, [[1, 0, 0], [0, 1, 1], [0, 0, 1]])
        assert matrix.total == 4
        assert matrix.accuracy() == 0.75

    @pytest.mark.unit
    def test_confusion_sum(self):
        first = confusion(np.array([0, 1]), np.array([0, 0]), 2)
        second = confusion(np.array([1]), np.array([1]), 2)

        np.testing.assert_array_equal((first + second).counts, [[1, 1], [0, 1]])

    @pytest.mark.unit
    def test_empty_matrix_accuracy(self):
        assert ConfusionMatrix(np.zeros((2, 2), dtype=int)).accuracy() == 0.0


class TestResultsTable:
    """Test pooling runs into table cells."""

    @pytest.mark.unit
    def test_mean_and_population_std(self):
        runs = [Run("nb", "raw", 0.5, 0.8, seed=1), Run("nb", "raw", 0.5, 0.6, seed=2)]

        table = ResultsTable.aggregate(runs, ("nb",), ("raw",), (0.5,))

        cell = table.cell("nb", "raw")
        assert cell.mean == pytest.approx(0.7)
        assert cell.std == pytest.approx(0.1)
        assert cell.runs == 2 and cell.failed == 0

    @pytest.mark.unit
    def test_identical_runs_have_zero_std(self):
        runs = [Run("nb", "raw", f, 0.9, seed=s) for s in (1, 2) for f in (0.25, 0.5)]

        table = ResultsTable.aggregate(runs, ("nb",), ("raw",), (0.25, 0.5))

        assert table.cell("nb", "raw").std == 0.0
        assert table.by_fraction[("nb", "raw", 0.25)].runs == 2

    @pytest.mark.unit
    def test_fifteen_identical_runs_are_exact(self):
        """Five seeds by three fractions at 132/180 pool to exactly that accuracy."""
        accuracy = 132 / 180
        fractions = (0.25, 0.5, 0.75)
        runs = [Run("xgb", "raw", f, accuracy, seed=s) for s in range(1, 6) for f in fractions]

        cell = ResultsTable.aggregate(runs, ("xgb",), ("raw",), fractions).cell("xgb", "raw")

        assert cell.runs == 15
        assert cell.mean == accuracy
        assert cell.std == 0.0

    @pytest.mark.unit
    def test_failures_are_counted_not_averaged(self):
        runs = [Run("dt", "ngn", 0.5, None, seed=1), Run("dt", "ngn", 0.5, 0.5, seed=2)]

        cell = ResultsTable.aggregate(runs, ("dt",), ("ngn",), (0.5,)).cell("dt", "ngn")

        assert cell.failed == 1
        assert cell.runs == 1
        assert cell.mean == 0.5

    @pytest.mark.unit
    def test_all_failed_cell(self):
        cell = ResultsTable.aggregate([Run("dt", "ngn", 0.5, None)], ("dt",), ("ngn",), (0.5,)).cell("dt", "ngn")

        assert cell.runs == 0
        assert math.isnan(cell.mean)

    @pytest.mark.unit
    def test_empty_cells_exist(self):
        table = ResultsTable.aggregate([], ("nb", "dt"), ("raw",), (0.5,))

        assert table.cell("dt", "raw").runs == 0

    @pytest.mark.unit
    def test_order_independent(self, rng):
        runs = [
            Run(c, s, f, float(rng.uniform()), seed=seed)
            for c in ("nb", "dt")
            for s in ("raw", "chi2")
            for f in (0.25, 0.5, 0.75)
            for seed in range(4)
        ]
        shuffled = runs[:]
        random.Random(3).shuffle(shuffled)

        first = ResultsTable.aggregate(runs, ("nb", "dt"), ("raw", "chi2"), (0.25, 0.5, 0.75))
        second = ResultsTable.aggregate(shuffled, ("nb", "dt"), ("raw", "chi2"), (0.25, 0.5, 0.75))

        assert first.cells == second.cells
