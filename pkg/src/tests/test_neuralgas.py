"""Tests for neural gas training and feature ranking."""

import numpy as np
import pytest

from ngnboost import neuralgas
from ngnboost.config import NGNParams
from ngnboost.exceptions import DatasetError, SelectionError


class TestSchedules:
    """Test the exponential decay schedules."""

    @pytest.mark.unit
    def test_endpoints(self):
        """Schedules start at the initial and end at the final value."""
        params = NGNParams(eps_initial=0.5, eps_final=0.005, lambda_initial=10.0, lambda_final=0.5)

        assert neuralgas.learning_rate(params, 0, 100) == pytest.approx(0.5)
        assert neuralgas.learning_rate(params, 100, 100) == pytest.approx(0.005)
        assert neuralgas.neighborhood_range(params, 0, 100) == pytest.approx(10.0)
        assert neuralgas.neighborhood_range(params, 100, 100) == pytest.approx(0.5)

    @pytest.mark.unit
    def test_monotone(self):
        """Both schedules decrease over time."""
        params = NGNParams()
        rates = [neuralgas.learning_rate(params, t, 50) for t in range(51)]

        assert all(a > b for a, b in zip(rates, rates[1:]))


class TestTrain:
    """Test codebook training."""

    @pytest.mark.unit
    def test_single_neuron_finds_the_mean(self, rng):
        """One neuron converges to the data mean."""
        X = rng.normal(loc=[2.0, -1.0], scale=0.5, size=(200, 2))
        params = NGNParams(n_neurons=1, eps_initial=0.5, eps_final=1e-4, t_max=20000, seed=0)

        codebook = neuralgas.train(X, params)

        np.testing.assert_allclose(codebook.positions[0], X.mean(axis=0), atol=0.05)

    @pytest.mark.unit
    def test_one_neuron_per_point(self):
        """Three neurons settle on three points 10 apart."""
        X = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
        params = NGNParams(
            n_neurons=3,
            eps_initial=0.5,
            eps_final=0.01,
            lambda_initial=0.5,
            lambda_final=0.01,
            t_max=3000,
            seed=2,
        )

        codebook = neuralgas.train(X, params)

        distances = np.linalg.norm(codebook.positions[:, None, :] - X[None, :, :], axis=2)
        assert np.all(distances.min(axis=0) < 0.05)
        assert np.all(distances.min(axis=1) < 0.05)

    @pytest.mark.unit
    def test_quantization_error_trace(self, rng):
        """One entry at start, one per epoch, and one at the final step."""
        X = rng.normal(size=(10, 3))

        codebook = neuralgas.train(X, NGNParams(n_neurons=2, t_max=25))

        assert len(codebook.qe_trace) == 4
        assert codebook.qe_trace[-1] == pytest.approx(neuralgas.quantization_error(X, codebook.positions))

    @pytest.mark.unit
    def test_more_neurons_than_rows(self, rng):
        """The codebook cannot be initialized from fewer rows than neurons."""
        with pytest.raises(DatasetError):
            neuralgas.train(rng.normal(size=(3, 2)), NGNParams(n_neurons=4))

    @pytest.mark.unit
    def test_deterministic(self, blobs):
        """Same seed, same codebook."""
        params = NGNParams(n_neurons=4, t_max=500, seed=9)

        first = neuralgas.train(blobs.features, params)
        second = neuralgas.train(blobs.features, params)

        np.testing.assert_array_equal(first.positions, second.positions)
        assert first.qe_trace == second.qe_trace

    @pytest.mark.unit
    def test_codebook_csv(self, tmp_path):
        """One row per neuron, one column per feature."""
        codebook = neuralgas.Codebook(positions=np.array([[0.0, 1.0], [2.0, 3.0]]), qe_trace=(1.0,))

        path = codebook.to_csv(tmp_path / "codebook.csv", ("a", "b"))

        assert path.read_text().splitlines()[0] == "neuron,a,b"


class TestRanking:
    """Test codebook variance ranking."""

    @pytest.mark.unit
    def test_variance_per_feature(self):
        """Scores are the population variance of each codebook column."""
        codebook = neuralgas.Codebook(positions=np.array([[0.0, 0.0, 1.0], [2.0, 0.0, 1.0]]), qe_trace=())

        scores = neuralgas.rank_features(codebook)

        np.testing.assert_allclose(scores, [1.0, 0.0, 0.0])
        assert neuralgas.ranking(scores).tolist() == [0, 1, 2]

    @pytest.mark.unit
    def test_ties_prefer_lower_index(self):
        assert neuralgas.ranking(np.array([1.0, 3.0, 3.0, 0.5])).tolist() == [1, 2, 0, 3]

    @pytest.mark.unit
    def test_select_is_ranking_prefix(self, blobs):
        """select(k) returns the first k entries of the full ranking."""
        params = NGNParams(n_neurons=4, t_max=600, seed=1)

        full = neuralgas.ranking(neuralgas.rank_features(neuralgas.train(blobs.features, params)))

        assert neuralgas.select(blobs.features, 3, params) == full[:3].tolist()

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", range(5))
    def test_two_cluster_feature_ranks_high(self, seed):
        """A feature split into clusters at -3 and +3 beats tight noise columns."""
        rng = np.random.default_rng(seed)
        X = rng.normal(0.0, 0.1, size=(200, 6))
        X[:, 0] += np.where(np.arange(200) % 2 == 0, -3.0, 3.0)

        top = neuralgas.select(X, 3, NGNParams(t_max=4000, seed=seed))

        assert 0 in top

    @pytest.mark.unit
    @pytest.mark.parametrize("k", [0, 7])
    def test_select_k_out_of_range(self, blobs, k):
        with pytest.raises(SelectionError):
            neuralgas.select(blobs.features, k, NGNParams(n_neurons=4, t_max=100))
