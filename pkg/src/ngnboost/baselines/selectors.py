"""Benchmark feature selectors (chi-square, PCA, Lasso) and the shared selector result."""

import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .. import neuralgas
from ..config import LassoConfig, NGNParams
from ..exceptions import DimensionMismatch, SelectionError

logger = logging.getLogger(__name__)

INDEX_KINDS = ("chi2", "lasso", "ngn", "raw")


@dataclass(frozen=True)
class SelectorResult:
    """Selected original columns (indices) or a projection onto new components (pca)."""

    kind: str
    n_features: int
    indices: Optional[tuple[int, ...]] = None
    projection: Optional[np.ndarray] = None  # (d, k)
    center: Optional[np.ndarray] = None  # (d,)
    scores: Optional[np.ndarray] = None  # per original feature, or per component for pca

    def __post_init__(self) -> None:
        if self.kind == "pca":
            if self.projection is None or self.center is None:
                raise SelectionError("pca result needs a projection and a center")
        else:
            if self.indices is None:
                raise SelectionError(f"{self.kind} result needs indices")
            if len(set(self.indices)) != len(self.indices) or any(
                not 0 <= i < self.n_features for i in self.indices
            ):
                raise SelectionError(f"indices must be distinct and lie in 0..{self.n_features - 1}")

    @property
    def k(self) -> int:
        return self.projection.shape[1] if self.kind == "pca" else len(self.indices)

    def head(self, k: int) -> "SelectorResult":
        """The top-k prefix of this selection."""
        if not 1 <= k <= self.k:
            raise SelectionError(f"k must lie in 1..{self.k}, got {k}")
        if self.kind == "pca":
            return replace(self, projection=self.projection[:, :k])
        return replace(self, indices=self.indices[:k])

    def to_csv(self, path: str | Path, feature_names: tuple[str, ...]) -> Path:
        """Indices with names and scores, or the projection matrix (one row per original feature)."""
        path = Path(path)
        if self.kind == "pca":
            frame = pd.DataFrame(self.projection, columns=[f"pc{j}" for j in range(self.k)])
            frame.insert(0, "feature", list(feature_names))
        else:
            frame = pd.DataFrame(
                {
                    "rank": range(self.k),
                    "index": list(self.indices),
                    "feature": [feature_names[i] for i in self.indices],
                    "score": [float(self.scores[i]) if self.scores is not None else np.nan for i in self.indices],
                }
            )
        frame.to_csv(path, index=False)
        return path


def _check_k(k: int, d: int) -> None:
    if not 1 <= k <= d:
        raise SelectionError(f"k must lie in 1..{d}, got {k}")


def _top_k(scores: np.ndarray, k: int) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argsort(-scores, kind="stable")[:k])


def apply_selector(result: SelectorResult, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != result.n_features:
        raise DimensionMismatch(f"selector fitted on {result.n_features} features, got shape {X.shape}")
    if result.kind == "pca":
        return pca_apply(result, X)
    return X[:, list(result.indices)]


def raw_select(X: np.ndarray) -> SelectorResult:
    d = np.asarray(X).shape[1]
    return SelectorResult(kind="raw", n_features=d, indices=tuple(range(d)))


# Chi-square


def chi2_statistic(table: np.ndarray) -> float:
    """Pearson's sum of (observed - expected)^2 / expected over a contingency table."""
    observed = np.asarray(table, dtype=float)
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / observed.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    return float(terms.sum())


def chi2_scores(X: np.ndarray, y: np.ndarray, n_classes: Optional[int] = None) -> np.ndarray:
    """Class-sum chi-square of each min-max scaled feature."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    K = n_classes if n_classes is not None else int(y.max()) + 1
    low, high = X.min(axis=0), X.max(axis=0)
    span = np.where(high > low, high - low, 1.0)
    scaled = (X - low) / span
    onehot = np.eye(K)[y]
    observed = onehot.T @ scaled  # (K, d)
    class_prob = onehot.mean(axis=0)
    expected = np.outer(class_prob, scaled.sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (observed - expected) ** 2 / expected, 0.0)
    return terms.sum(axis=0)


def chi2_select(X: np.ndarray, y: np.ndarray, k: int, n_classes: Optional[int] = None) -> SelectorResult:
    X = np.asarray(X, dtype=float)
    _check_k(k, X.shape[1])
    scores = chi2_scores(X, y, n_classes)
    return SelectorResult(kind="chi2", n_features=X.shape[1], indices=_top_k(scores, k), scores=scores)


# PCA


def pca_select(X_train: np.ndarray, k: int) -> SelectorResult:
    """Top-k eigenvectors of the train covariance.

    Each eigenvector's first non-negligible component is made positive.
    """
    X_train = np.asarray(X_train, dtype=float)
    d = X_train.shape[1]
    _check_k(k, d)
    center = X_train.mean(axis=0)
    centered = X_train - center
    covariance = centered.T @ centered / X_train.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]
    for j in range(d):
        nonzero = np.flatnonzero(np.abs(eigenvectors[:, j]) > 1e-12)
        if nonzero.size and eigenvectors[nonzero[0], j] < 0:
            eigenvectors[:, j] = -eigenvectors[:, j]
    return SelectorResult(
        kind="pca",
        n_features=d,
        projection=eigenvectors[:, :k],
        center=center,
        scores=np.maximum(eigenvalues, 0.0),
    )


def pca_apply(result: SelectorResult, X: np.ndarray) -> np.ndarray:
    """(X - train mean) @ projection."""
    return (np.asarray(X, dtype=float) - result.center) @ result.projection


# Lasso


def lasso_coefficients(
    X: np.ndarray, Y: np.ndarray, lambda_l1: float, max_sweeps: int = 500, tol: float = 1e-8
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Cyclic coordinate descent on (1 / 2n) ||Y - X B - b0||^2 + lambda ||B||_1.

    Y holds one target per column. Returns (B (d x t), intercepts (t,), objective per sweep).
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    n, d = X.shape
    x_mean, y_mean = X.mean(axis=0), Y.mean(axis=0)
    Xc, Yc = X - x_mean, Y - y_mean
    col_sq = (Xc**2).sum(axis=0) / n
    B = np.zeros((d, Y.shape[1]))
    residual = Yc.copy()

    def objective() -> float:
        return float((residual**2).sum() / (2 * n) + lambda_l1 * np.abs(B).sum())

    trace = [objective()]
    for _ in range(max_sweeps):
        max_change = 0.0
        for j in range(d):
            if col_sq[j] <= 0:
                continue
            old = B[j].copy()
            rho = Xc[:, j] @ residual / n + col_sq[j] * old
            new = np.sign(rho) * np.maximum(np.abs(rho) - lambda_l1, 0.0) / col_sq[j]
            if np.any(new != old):
                residual -= np.outer(Xc[:, j], new - old)
                B[j] = new
                max_change = max(max_change, float(np.max(np.abs(new - old))))
        trace.append(objective())
        if max_change < tol:
            break
    return B, y_mean - x_mean @ B, trace


def lasso_select(
    X_train: np.ndarray,
    y: np.ndarray,
    k: int,
    config: LassoConfig = LassoConfig(),
    n_classes: Optional[int] = None,
) -> SelectorResult:
    """One-vs-rest Lasso on one-hot targets; score = max |coefficient| over classes."""
    X_train = np.asarray(X_train, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    _check_k(k, X_train.shape[1])
    K = n_classes if n_classes is not None else int(y.max()) + 1
    B, _, _ = lasso_coefficients(X_train, np.eye(K)[y], config.lambda_l1, config.max_sweeps, config.tol)
    scores = np.abs(B).max(axis=1)
    if not np.any(scores > 0):
        logger.warning(f"Lasso (lambda={config.lambda_l1}) zeroed every coefficient; selection falls back to index order")
    return SelectorResult(kind="lasso", n_features=X_train.shape[1], indices=_top_k(scores, k), scores=scores)


# Neural gas


def ngn_select(X_train: np.ndarray, k: int, params: NGNParams = NGNParams()) -> tuple[SelectorResult, neuralgas.Codebook]:
    """Neural gas selection packaged as a SelectorResult, with the codebook it came from."""
    X_train = np.asarray(X_train, dtype=float)
    _check_k(k, X_train.shape[1])
    codebook = neuralgas.train(X_train, params)
    scores = neuralgas.rank_features(codebook)
    indices = tuple(int(i) for i in neuralgas.ranking(scores)[:k])
    return SelectorResult(kind="ngn", n_features=X_train.shape[1], indices=indices, scores=scores), codebook
