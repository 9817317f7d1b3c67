"""Tests for the benchmark classifiers and feature selectors."""

import logging

import numpy as np
import pytest

from ngnboost import boostforest
from ngnboost.baselines import (
    SelectorResult,
    apply_selector,
    cart_fit,
    cart_predict,
    chi2_select,
    chi2_statistic,
    gini,
    lasso_coefficients,
    lasso_select,
    lr_fit,
    lr_loss_and_grad,
    lr_predict,
    lr_predict_proba,
    nb_fit,
    nb_predict,
    ngn_select,
    pca_apply,
    pca_select,
    raw_select,
)
from ngnboost.baselines.classifiers import nb_log_posterior
from ngnboost.config import BoostParams, CARTConfig, LassoConfig, LRConfig, NGNParams
from ngnboost.exceptions import DatasetError, DimensionMismatch, SelectionError

XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([0, 1, 1, 0])


class TestNaiveBayes:
    """Test Gaussian naive Bayes."""

    @pytest.mark.unit
    def test_separated_gaussians(self, rng):
        X = np.concatenate([rng.normal(-3.0, 1.0, size=(100, 1)), rng.normal(3.0, 1.0, size=(100, 1))])
        y = np.repeat([0, 1], 100)

        model = nb_fit(X, y)

        assert np.mean(nb_predict(model, X) == y) > 0.95
        np.testing.assert_allclose(model.priors, [0.5, 0.5])

    @pytest.mark.unit
    def test_single_class(self, rng):
        X = rng.normal(size=(10, 2))

        model = nb_fit(X, np.zeros(10, dtype=int))

        assert np.all(nb_predict(model, X) == 0)

    @pytest.mark.unit
    def test_constant_feature_stays_finite(self, rng):
        X = np.column_stack([rng.normal(size=20), np.full(20, 3.0)])
        y = np.repeat([0, 1], 10)

        model = nb_fit(X, y)

        assert np.all(np.isfinite(nb_log_posterior(model, X)))

    @pytest.mark.unit
    def test_absent_class_is_never_predicted(self, rng):
        X = rng.normal(size=(10, 2))

        model = nb_fit(X, np.repeat([0, 1], 5), n_classes=3)

        assert model.priors[2] == 0.0
        assert not np.any(nb_predict(model, X) == 2)


class TestLogisticRegression:
    """Test gradient-descent softmax regression."""

    @pytest.mark.unit
    def test_separable(self):
        X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        y = np.array([0, 0, 1, 1])

        model = lr_fit(X, y)

        np.testing.assert_array_equal(lr_predict(model, X), y)

    @pytest.mark.unit
    def test_zero_iterations(self, blobs):
        """Zero weights give uniform probabilities and class 0."""
        model = lr_fit(blobs.features, blobs.labels, LRConfig(n_iters=0))

        np.testing.assert_allclose(lr_predict_proba(model, blobs.features), 1.0 / 3.0)
        assert np.all(lr_predict(model, blobs.features) == 0)

    @pytest.mark.unit
    def test_converges_to_a_stationary_point(self, rng):
        X = rng.normal(size=(200, 3))
        y = (X[:, 0] + rng.normal(size=200) > 0).astype(int)
        config = LRConfig(step_size=0.5, n_iters=5000, l2=1e-2)

        model = lr_fit(X, y, config)
        _, grad_w, grad_b = lr_loss_and_grad(model.weights, model.intercepts, X, y, config.l2)

        assert np.linalg.norm(grad_w) < 1e-3
        assert np.linalg.norm(grad_b) < 1e-3

    @pytest.mark.unit
    def test_single_class(self):
        with pytest.raises(DatasetError):
            lr_fit(np.zeros((3, 2)), np.zeros(3, dtype=int))


class TestCART:
    """Test the gini decision tree."""

    @pytest.mark.unit
    def test_gini(self):
        assert gini(np.array([1, 1])) == pytest.approx(0.5)
        assert gini(np.array([3, 0])) == pytest.approx(0.0)

    @pytest.mark.unit
    def test_xor(self):
        """Zero-gain root splits still let the tree solve XOR at depth 2."""
        model = cart_fit(XOR_X, XOR_Y)

        assert model.depth() == 2
        np.testing.assert_array_equal(cart_predict(model, XOR_X), XOR_Y)

    @pytest.mark.unit
    def test_pure_node_is_a_leaf(self):
        model = cart_fit(np.arange(5.0)[:, None], np.zeros(5, dtype=int))

        assert model.depth() == 0
        assert model.feature.tolist() == [-1]

    @pytest.mark.unit
    def test_max_depth(self, blobs):
        model = cart_fit(blobs.features, blobs.labels, CARTConfig(max_depth=1))

        assert model.depth() == 1

    @pytest.mark.unit
    def test_same_root_split_as_the_booster(self):
        """Both tree builders share the split scan and its tie-break."""
        X = np.array([[1.0, 5.0], [2.0, 3.0], [3.0, 4.0], [4.0, 1.0]])
        y = np.array([0, 0, 1, 1])

        tree = cart_fit(X, y, CARTConfig(max_depth=1))
        booster = boostforest.fit(X, y, BoostParams(max_depth=1, n_rounds=1, min_child_weight=0.0))

        assert (tree.feature[0], tree.threshold[0]) == (0, 2.5)
        assert (booster.trees[0][0].feature[0], booster.trees[0][0].threshold[0]) == (0, 2.5)

    @pytest.mark.unit
    def test_width_mismatch(self):
        model = cart_fit(XOR_X, XOR_Y)

        with pytest.raises(DimensionMismatch):
            cart_predict(model, np.zeros((2, 3)))


class TestChiSquare:
    """Test the chi-square selector."""

    @pytest.mark.unit
    def test_contingency_statistic(self):
        assert chi2_statistic(np.array([[10, 0], [0, 10]])) == pytest.approx(20.0)
        assert chi2_statistic(np.array([[5, 5], [5, 5]])) == pytest.approx(0.0)

    @pytest.mark.unit
    def test_label_aligned_feature_ranks_first(self, rng):
        y = np.repeat([0, 1], 50)
        X = rng.uniform(size=(100, 4))
        X[:, 2] = y + 0.01 * rng.normal(size=100)

        result = chi2_select(X, y, 2)

        assert result.indices[0] == 2
        assert result.k == 2

    @pytest.mark.unit
    def test_k_out_of_range(self, blobs):
        with pytest.raises(SelectionError):
            chi2_select(blobs.features, blobs.labels, 7)


class TestPCA:
    """Test the PCA projection."""

    @pytest.mark.unit
    def test_orthonormal_projection(self, blobs):
        result = pca_select(blobs.features, 4)

        np.testing.assert_allclose(result.projection.T @ result.projection, np.eye(4), atol=1e-10)

    @pytest.mark.unit
    def test_collinear_direction(self, rng):
        t = rng.normal(size=200)
        X = np.column_stack([t, 2.0 * t]) + 1e-3 * rng.normal(size=(200, 2))

        result = pca_select(X, 1)

        direction = np.array([1.0, 2.0]) / np.sqrt(5.0)
        assert float(result.projection[:, 0] @ direction) > 0.999

    @pytest.mark.unit
    def test_variance_preserved(self, blobs):
        """Eigenvalues sum to the total population variance."""
        result = pca_select(blobs.features, 6)

        assert result.scores.sum() == pytest.approx(blobs.features.var(axis=0).sum())
        assert np.all(np.diff(result.scores) <= 1e-12)

    @pytest.mark.unit
    def test_apply_centers_on_train(self, blobs):
        result = pca_select(blobs.features, 2)

        projected = pca_apply(result, blobs.features)

        assert projected.shape == (120, 2)
        np.testing.assert_allclose(projected.mean(axis=0), 0.0, atol=1e-10)


class TestLasso:
    """Test coordinate-descent Lasso."""

    @pytest.mark.unit
    def test_zero_penalty_matches_least_squares(self, rng):
        X = rng.normal(size=(100, 3))
        y = X @ np.array([1.5, -2.0, 0.5]) + 0.3 + 0.1 * rng.normal(size=100)

        B, intercept, _ = lasso_coefficients(X, y, 0.0, max_sweeps=10000, tol=1e-12)
        design = np.column_stack([X, np.ones(100)])
        expected, *_ = np.linalg.lstsq(design, y, rcond=None)

        np.testing.assert_allclose(B[:, 0], expected[:3], atol=1e-6)
        assert intercept[0] == pytest.approx(expected[3], abs=1e-6)

    @pytest.mark.unit
    def test_objective_never_increases(self, blobs):
        Y = np.eye(3)[blobs.labels]

        _, _, trace = lasso_coefficients(blobs.features, Y, 0.05, max_sweeps=50)

        assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))

    @pytest.mark.unit
    def test_huge_penalty_warns(self, blobs, caplog):
        with caplog.at_level(logging.WARNING):
            result = lasso_select(blobs.features, blobs.labels, 2, LassoConfig(lambda_l1=1e6))

        assert "zeroed every coefficient" in caplog.text
        assert result.indices == (0, 1)


class TestSelectorResult:
    """Test the shared selection result."""

    @pytest.mark.unit
    def test_head_is_a_prefix(self, blobs):
        result = chi2_select(blobs.features, blobs.labels, 6)

        assert result.head(3).indices == result.indices[:3]
        with pytest.raises(SelectionError):
            result.head(0)

    @pytest.mark.unit
    def test_pca_head(self, blobs):
        result = pca_select(blobs.features, 6)

        np.testing.assert_array_equal(result.head(2).projection, result.projection[:, :2])

    @pytest.mark.unit
    def test_apply_width_mismatch(self, blobs):
        result = raw_select(blobs.features)

        with pytest.raises(DimensionMismatch):
            apply_selector(result, blobs.features[:, :2])

    @pytest.mark.unit
    def test_apply_picks_columns_in_rank_order(self, blobs):
        result = chi2_select(blobs.features, blobs.labels, 3)

        np.testing.assert_array_equal(apply_selector(result, blobs.features), blobs.features[:, list(result.indices)])

    @pytest.mark.unit
    def test_duplicate_indices_rejected(self):
        with pytest.raises(SelectionError):
            SelectorResult(kind="chi2", n_features=3, indices=(0, 0))

    @pytest.mark.unit
    def test_ngn_result_and_codebook(self, blobs):
        result, codebook = ngn_select(blobs.features, 2, NGNParams(n_neurons=4, t_max=300))

        assert result.kind == "ngn" and result.k == 2
        assert codebook.positions.shape == (4, 6)

    @pytest.mark.unit
    def test_csv(self, tmp_path, blobs):
        result = chi2_select(blobs.features, blobs.labels, 2)

        path = result.to_csv(tmp_path / "sel.csv", blobs.feature_names)

        assert path.read_text().splitlines()[0] == "rank,index,feature,score"
