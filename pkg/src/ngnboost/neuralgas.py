"""Neural gas codebook training and codebook-driven feature ranking."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .config import NGNParams
from .exceptions import DatasetError, SelectionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Codebook:
    """Trained neuron positions and the quantization error sampled once per epoch."""

    positions: np.ndarray
    qe_trace: tuple[float, ...]

    @property
    def n_neurons(self) -> int:
        return self.positions.shape[0]

    def to_csv(self, path: str | Path, feature_names: tuple[str, ...]) -> Path:
        """One row per neuron."""
        path = Path(path)
        pd.DataFrame(self.positions, columns=list(feature_names)).to_csv(path, index_label="neuron")
        return path


def learning_rate(params: NGNParams, t: float, t_max: int) -> float:
    """eps(t) = eps_initial * (eps_final / eps_initial) ** (t / t_max)."""
    return params.eps_initial * (params.eps_final / params.eps_initial) ** (t / t_max)


def neighborhood_range(params: NGNParams, t: float, t_max: int) -> float:
    """lambda(t) = lambda_initial * (lambda_final / lambda_initial) ** (t / t_max)."""
    return params.lambda_initial * (params.lambda_final / params.lambda_initial) ** (t / t_max)


def quantization_error(X: np.ndarray, positions: np.ndarray) -> float:
    """Mean Euclidean distance from each row to its nearest neuron."""
    distances = np.sqrt(((X[:, None, :] - positions[None, :, :]) ** 2).sum(axis=2))
    return float(distances.min(axis=1).mean())


def train(X: np.ndarray, params: NGNParams) -> Codebook:
    """Online neural gas.

    Each step presents one seeded-random row and moves every neuron toward it
    by eps(t) * exp(-rank / lambda(t)), rank 0 being the nearest neuron.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DatasetError("neural gas needs a non-empty 2-D feature matrix")
    n_samples = X.shape[0]
    if params.n_neurons > n_samples:
        raise DatasetError(f"n_neurons ({params.n_neurons}) exceeds n_samples ({n_samples})")

    t_max = params.presentations(n_samples)
    rng = np.random.default_rng(params.seed)
    positions = X[rng.choice(n_samples, size=params.n_neurons, replace=False)].copy()
    presented = rng.integers(0, n_samples, size=t_max)

    steps = np.arange(t_max) / t_max
    eps = params.eps_initial * (params.eps_final / params.eps_initial) ** steps
    lam = params.lambda_initial * (params.lambda_final / params.lambda_initial) ** steps

    qe_trace = [quantization_error(X, positions)]
    for t in range(t_max):
        x = X[presented[t]]
        delta = x - positions
        ranks = np.argsort(np.argsort((delta * delta).sum(axis=1), kind="stable"), kind="stable")
        positions += (eps[t] * np.exp(-ranks / lam[t]))[:, None] * delta
        if (t + 1) % n_samples == 0 or t + 1 == t_max:
            qe_trace.append(quantization_error(X, positions))
            logger.debug(f"neural gas step {t + 1}/{t_max}: quantization error {qe_trace[-1]:.6f}")

    return Codebook(positions=positions, qe_trace=tuple(qe_trace))


def rank_features(codebook: Codebook) -> np.ndarray:
    """Per-feature variance of the neuron positions (higher = more structure)."""
    if codebook.n_neurons < 1:
        raise SelectionError("codebook has no neurons")
    return codebook.positions.var(axis=0)


def ranking(scores: np.ndarray) -> np.ndarray:
    """Feature indices by descending score, ties to the lower index."""
    return np.argsort(-np.asarray(scores), kind="stable")


def select(X: np.ndarray, k: int, params: NGNParams) -> list[int]:
    """Indices of the k features with the largest codebook variance."""
    n_features = np.asarray(X).shape[1]
    if not 1 <= k <= n_features:
        raise SelectionError(f"k must lie in 1..{n_features}, got {k}")
    return ranking(rank_features(train(X, params)))[:k].tolist()
