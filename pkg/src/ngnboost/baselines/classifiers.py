"""Benchmark classifiers: Gaussian naive Bayes, softmax regression and a gini CART."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import splitting
from ..boostforest import softmax
from ..config import CARTConfig, LRConfig
from ..exceptions import DatasetError, DimensionMismatch, TrainingError

logger = logging.getLogger(__name__)

VAR_FLOOR = 1e-9


def _check_xy(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DatasetError("training data must be a non-empty 2-D matrix")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
    return X, y


def _check_width(X: np.ndarray, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise DimensionMismatch(f"model trained on {n_features} features, got shape {X.shape}")
    return X


# Gaussian naive Bayes


@dataclass(frozen=True)
class NBModel:
    priors: np.ndarray  # (K,)
    means: np.ndarray  # (K, d)
    variances: np.ndarray  # (K, d)


def nb_fit(X: np.ndarray, y: np.ndarray, n_classes: Optional[int] = None) -> NBModel:
    """Class priors and per-class Gaussian moments; absent classes get prior 0."""
    X, y = _check_xy(X, y)
    K = n_classes if n_classes is not None else int(y.max()) + 1
    counts = np.bincount(y, minlength=K).astype(float)
    means = np.zeros((K, X.shape[1]))
    variances = np.ones((K, X.shape[1]))
    for k in np.flatnonzero(counts):
        rows = X[y == k]
        means[k] = rows.mean(axis=0)
        variances[k] = rows.var(axis=0)
    return NBModel(priors=counts / counts.sum(), means=means, variances=np.maximum(variances, VAR_FLOOR))


def nb_log_posterior(model: NBModel, X: np.ndarray) -> np.ndarray:
    X = _check_width(X, model.means.shape[1])
    with np.errstate(divide="ignore"):
        log_prior = np.log(model.priors)
    log_likelihood = -0.5 * (
        np.log(2.0 * np.pi * model.variances).sum(axis=1)[None, :]
        + (((X[:, None, :] - model.means[None, :, :]) ** 2) / model.variances[None, :, :]).sum(axis=2)
    )
    return log_likelihood + log_prior[None, :]


def nb_predict(model: NBModel, X: np.ndarray) -> np.ndarray:
    return np.argmax(nb_log_posterior(model, X), axis=1)


# Multinomial logistic regression


@dataclass(frozen=True)
class LRModel:
    weights: np.ndarray  # (K, d)
    intercepts: np.ndarray  # (K,)
    config: LRConfig


def lr_loss_and_grad(
    weights: np.ndarray, intercepts: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy plus (l2 / 2) * ||W||^2, with gradients for W and b."""
    n = X.shape[0]
    p = softmax(X @ weights.T + intercepts)
    onehot = np.zeros_like(p)
    onehot[np.arange(n), y] = 1.0
    loss = -np.mean(np.log(np.maximum(p[np.arange(n), y], 1e-300))) + 0.5 * l2 * float(np.sum(weights**2))
    residual = (p - onehot) / n
    return float(loss), residual.T @ X + l2 * weights, residual.sum(axis=0)


def lr_fit(X: np.ndarray, y: np.ndarray, config: LRConfig = LRConfig(), n_classes: Optional[int] = None) -> LRModel:
    """Full-batch gradient descent from zero weights."""
    X, y = _check_xy(X, y)
    if np.unique(y).size < 2:
        raise DatasetError("logistic regression needs at least two classes")
    K = n_classes if n_classes is not None else int(y.max()) + 1
    weights = np.zeros((K, X.shape[1]))
    intercepts = np.zeros(K)
    for iteration in range(config.n_iters):
        loss, grad_w, grad_b = lr_loss_and_grad(weights, intercepts, X, y, config.l2)
        if not np.isfinite(loss):
            raise TrainingError("logistic regression loss became non-finite", iteration=iteration)
        weights -= config.step_size * grad_w
        intercepts -= config.step_size * grad_b
    if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(intercepts))):
        raise TrainingError("logistic regression weights became non-finite", iteration=config.n_iters)
    return LRModel(weights=weights, intercepts=intercepts, config=config)


def lr_predict_proba(model: LRModel, X: np.ndarray) -> np.ndarray:
    X = _check_width(X, model.weights.shape[1])
    return softmax(X @ model.weights.T + model.intercepts)


def lr_predict(model: LRModel, X: np.ndarray) -> np.ndarray:
    return np.argmax(lr_predict_proba(model, X), axis=1)


# CART


def gini(counts: np.ndarray) -> np.ndarray:
    """Gini impurity 1 - sum p_k^2 along the last axis."""
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(totals > 0, counts / totals, 0.0)
    return 1.0 - (p**2).sum(axis=-1)


@dataclass(frozen=True)
class CARTModel:
    """Preorder node arrays; feature == -1 marks a leaf holding `label`."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray
    n_features: int

    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(int(self.left[node])), walk(int(self.right[node])))

        return walk(0)


def cart_fit(
    X: np.ndarray, y: np.ndarray, config: CARTConfig = CARTConfig(), n_classes: Optional[int] = None
) -> CARTModel:
    """Exact greedy gini tree; impure nodes split whenever a boundary exists."""
    X, y = _check_xy(X, y)
    K = n_classes if n_classes is not None else int(y.max()) + 1
    onehot = np.eye(K)[y]
    nodes: dict[str, list] = {"feature": [], "threshold": [], "left": [], "right": [], "label": []}

    def add() -> int:
        for name, default in (("feature", -1), ("threshold", 0.0), ("left", -1), ("right", -1), ("label", 0)):
            nodes[name].append(default)
        return len(nodes["feature"]) - 1

    def grow(rows: np.ndarray, depth: int) -> int:
        node = add()
        counts = onehot[rows].sum(axis=0)
        nodes["label"][node] = int(np.argmax(counts))
        if (
            np.count_nonzero(counts) < 2
            or rows.size < config.min_samples_split
            or (config.max_depth is not None and depth >= config.max_depth)
        ):
            return node
        result = splitting.scan(X[rows], onehot[rows])
        n = rows.size
        left_n = np.arange(1, n)[:, None]
        weighted = (left_n * gini(result.left) + (n - left_n) * gini(result.total - result.left)) / n
        split = splitting.pick(result, gini(counts) - weighted)
        if split is None:
            return node
        goes_left = X[rows, split.feature] <= split.threshold
        nodes["feature"][node] = split.feature
        nodes["threshold"][node] = split.threshold
        nodes["left"][node] = grow(rows[goes_left], depth + 1)
        nodes["right"][node] = grow(rows[~goes_left], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return CARTModel(
        feature=np.array(nodes["feature"], dtype=np.int64),
        threshold=np.array(nodes["threshold"], dtype=float),
        left=np.array(nodes["left"], dtype=np.int64),
        right=np.array(nodes["right"], dtype=np.int64),
        label=np.array(nodes["label"], dtype=np.int64),
        n_features=X.shape[1],
    )


def cart_predict(model: CARTModel, X: np.ndarray) -> np.ndarray:
    X = _check_width(X, model.n_features)
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.flatnonzero(model.feature[node] >= 0)
    while active.size:
        current = node[active]
        go_left = X[active, model.feature[current]] <= model.threshold[current]
        node[active] = np.where(go_left, model.left[current], model.right[current])
        active = active[model.feature[node[active]] >= 0]
    return model.label[node]
