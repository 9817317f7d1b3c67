"""Integration tests: the full classifier x selector grid on the 25-feature surrogate."""

import math

import pandas as pd
import pytest

from ngnboost import ExperimentConfig, run_experiment
from ngnboost.core import get_registered_classifiers, get_registered_selectors, rebuild_report

pytestmark = pytest.mark.integration

FULL_GRID = {
    "data": {"synth": {"n": 600, "d": 25, "k": 4, "separation": 3.0, "seed": 7}},
    "experiment": {"seeds": [1], "fractions": [0.25, 0.5, 0.75], "concurrency": 2},
    "neural_gas": {"t_max": 6000},
    "boost": {"n_rounds": 30},
    "swarm": {"swarm_size": 4, "max_iters": 3},
    "tuning": {"n_rounds": 10},
    "logistic": {"n_iters": 300},
    "lasso": {"max_sweeps": 200},
}


@pytest.fixture(scope="module")
def full_grid(tmp_path_factory):
    """Every model on synth(600, 25, 4, 3.0): one seed, three fractions, small boosting budgets."""
    out_dir = tmp_path_factory.mktemp("full-grid")
    config = ExperimentConfig.from_dict(FULL_GRID)
    return config, run_experiment(config, out_dir), out_dir


class TestFullGrid:
    """Test the complete experiment end to end."""

    def test_every_cell_is_filled(self, full_grid):
        _, result, out_dir = full_grid

        for name in get_registered_classifiers():
            for selector in get_registered_selectors():
                cell = result.results.cell(name, selector)
                assert cell.failed == 0, (name, selector)
                assert cell.runs == 3
                assert 0.2 <= cell.mean <= 1.0
                assert not math.isnan(cell.std)

        frame = pd.read_csv(out_dir / f"results-{result.config_hash}.csv")
        assert len(frame) == 30

    def test_report_artifacts(self, full_grid):
        config, result, out_dir = full_grid
        h = result.config_hash

        for name in get_registered_classifiers():
            assert (out_dir / f"confusion-{name}-{h}.csv").exists()
            assert (out_dir / f"confusion-{name}-{h}.svg").exists()
        for stem in ("pso-trace", "ngn-scores", "membership"):
            assert (out_dir / f"{stem}-{h}.csv").exists()
            assert (out_dir / f"{stem}-{h}.svg").exists()

        trace = pd.read_csv(out_dir / f"pso-trace-{h}.csv")
        assert len(trace) == config.swarm.max_iters

        scores = pd.read_csv(out_dir / f"ngn-scores-{h}.csv")
        assert len(scores) == 25
        assert scores["score"].is_monotonic_decreasing

        confusion = pd.read_csv(out_dir / f"confusion-nb-{h}.csv", index_col=0)
        assert list(confusion.columns) == ["High Risk", "Medium Risk", "Normal", "Low Risk"]
        # three fractions of one 180-row test split under the reference selector
        assert int(confusion.to_numpy().sum()) == 3 * 180

    def test_boosters_beat_chance(self, full_grid):
        _, result, _ = full_grid

        for name in ("xgb", "fuzzy_xgb", "pso_fuzzy_xgb"):
            assert result.results.cell(name, "raw").mean > 0.4

    def test_tuned_fuzzy_booster_matches_naive_bayes(self, full_grid):
        """On all features the swarm-tuned fuzzy booster is at least as accurate as Gaussian NB."""
        _, result, _ = full_grid

        assert result.results.cell("pso_fuzzy_xgb", "raw").mean >= result.results.cell("nb", "raw").mean

    def test_rebuild_matches(self, full_grid):
        _, result, out_dir = full_grid
        results_csv = out_dir / f"results-{result.config_hash}.csv"
        before = results_csv.read_bytes()

        rebuild_report(out_dir)

        assert results_csv.read_bytes() == before
