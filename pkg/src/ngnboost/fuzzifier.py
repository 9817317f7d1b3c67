"""Tertile fuzzification: crisp low/medium/high states and triangular memberships."""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .config import FuzzyConfig
from .exceptions import DatasetError, DimensionMismatch, FuzzyError

LOW, MEDIUM, HIGH = 0, 1, 2


@dataclass(frozen=True)
class FuzzyThresholds:
    """Per-feature lower and upper cut points."""

    t_low: np.ndarray
    t_high: np.ndarray

    @property
    def n_features(self) -> int:
        return self.t_low.shape[0]

    def to_csv(self, path: str | Path, feature_names: tuple[str, ...]) -> Path:
        path = Path(path)
        frame = pd.DataFrame({"feature": list(feature_names), "t_low": self.t_low, "t_high": self.t_high})
        frame.to_csv(path, index=False)
        return path


def fit(X_train: np.ndarray, low_quantile: float = 0.33, high_quantile: float = 0.67) -> FuzzyThresholds:
    """Per-feature quantiles, linearly interpolated at position p * (n - 1)."""
    X_train = np.asarray(X_train, dtype=float)
    if X_train.ndim != 2 or X_train.shape[0] == 0:
        raise DatasetError("cannot fit fuzzy thresholds on an empty matrix")
    t_low = np.quantile(X_train, low_quantile, axis=0, method="linear")
    t_high = np.quantile(X_train, high_quantile, axis=0, method="linear")
    return FuzzyThresholds(t_low=t_low, t_high=np.maximum(t_high, t_low))


def transform(X: np.ndarray, thr: FuzzyThresholds) -> np.ndarray:
    """Crisp states: 0 if x <= t_low, 2 if x >= t_high, 1 otherwise.

    Degenerate features (t_low == t_high) map to 1 everywhere.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != thr.n_features:
        raise DimensionMismatch(f"thresholds fitted on {thr.n_features} features, got shape {X.shape}")
    states = np.full(X.shape, MEDIUM, dtype=np.int64)
    states[X <= thr.t_low] = LOW
    states[X >= thr.t_high] = HIGH
    states[:, thr.t_low == thr.t_high] = MEDIUM
    return states


def membership(x: float | np.ndarray, t_low: float, t_high: float) -> tuple:
    """Triangular partition of unity with knots t_low, midpoint and t_high.

    Accepts a scalar or an array for x; returns (mu_low, mu_med, mu_high).
    """
    if t_low > t_high:
        raise FuzzyError(f"t_low ({t_low}) exceeds t_high ({t_high})")
    x_arr = np.asarray(x, dtype=float)
    if t_low == t_high:
        low = np.zeros_like(x_arr)
        med = np.ones_like(x_arr)
        high = np.zeros_like(x_arr)
    else:
        mid = 0.5 * (t_low + t_high)
        low = np.clip((mid - x_arr) / (mid - t_low), 0.0, 1.0)
        high = np.clip((x_arr - mid) / (t_high - mid), 0.0, 1.0)
        med = 1.0 - low - high
    if x_arr.ndim == 0:
        return float(low), float(med), float(high)
    return low, med, high


def membership_table(
    thr: FuzzyThresholds, feature: int, n_points: int = 201, x_range: Optional[tuple[float, float]] = None
) -> pd.DataFrame:
    """Sampled (x, mu_low, mu_med, mu_high) curves of one feature."""
    t_low, t_high = float(thr.t_low[feature]), float(thr.t_high[feature])
    if x_range is None:
        pad = max(t_high - t_low, 1.0)
        x_range = (t_low - pad, t_high + pad)
    xs = np.linspace(x_range[0], x_range[1], n_points)
    low, med, high = membership(xs, t_low, t_high)
    return pd.DataFrame({"x": xs, "mu_low": low, "mu_med": med, "mu_high": high})


def fuzzify(
    X_train: np.ndarray, X_other: np.ndarray, config: FuzzyConfig = FuzzyConfig()
) -> tuple[np.ndarray, np.ndarray, FuzzyThresholds]:
    """Fit thresholds on train and map both matrices.

    In replace mode the states are the new features; in augment mode they are
    appended to the continuous columns.
    """
    thr = fit(X_train, config.low_quantile, config.high_quantile)
    return encode(X_train, thr, config.mode), encode(X_other, thr, config.mode), thr


def encode(X: np.ndarray, thr: FuzzyThresholds, mode: str = "replace") -> np.ndarray:
    """Features a fuzzy model sees for X under already fitted thresholds."""
    states = transform(X, thr).astype(float)
    if mode == "augment":
        return np.hstack([np.asarray(X, dtype=float), states])
    return states
