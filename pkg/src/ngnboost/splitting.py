"""Exact greedy split scanning shared by the boosted trees and CART.

Both tree builders score every boundary between adjacent distinct values of
every feature from prefix sums of additive per-row statistics, put the
threshold at the midpoint, and break gain ties by (lower feature index,
lower threshold).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SplitScan:
    """Prefix statistics of one node, one column block per feature.

    left[i, j] holds the summed statistics of the i + 1 smallest rows of
    feature j; valid[i, j] is True where row i and i + 1 differ in value.
    """

    sorted_values: np.ndarray  # (m, d)
    left: np.ndarray  # (m - 1, d, s)
    total: np.ndarray  # (s,)
    valid: np.ndarray  # (m - 1, d)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def presort(X: np.ndarray) -> np.ndarray:
    """Row order of every column, ascending, ties kept in row order."""
    return np.argsort(X, axis=0, kind="stable")


def restrict(order: np.ndarray, member: np.ndarray) -> np.ndarray:
    """Keep the rows flagged in `member` (one flag per row of X) in every column of `order`."""
    keep = member[order]
    count = int(keep[:, 0].sum())
    return order.T[keep.T].reshape(order.shape[1], count).T


def scan_sorted(X: np.ndarray, stats: np.ndarray, order: np.ndarray) -> SplitScan:
    """scan() over the node rows listed in `order`, column j sorted by feature j.

    Gives the same result as scan(X[rows], stats[rows]) for ascending `rows`
    when `order` comes from presort() followed by restrict().
    """
    sorted_values = np.take_along_axis(X, order, axis=0)
    cumulative = np.cumsum(stats[order], axis=0)
    return SplitScan(
        sorted_values=sorted_values,
        left=cumulative[:-1],
        total=stats[np.sort(order[:, 0])].sum(axis=0),
        valid=sorted_values[1:] > sorted_values[:-1],
    )


def scan(X: np.ndarray, stats: np.ndarray) -> SplitScan:
    """Sort each feature and accumulate `stats` (m x s) along the sorted order."""
    return scan_sorted(X, stats, presort(X))


def pick(result: SplitScan, gain: np.ndarray, allowed: Optional[np.ndarray] = None) -> Optional[Split]:
    """Best (feature, threshold) under the shared tie-break, or None."""
    mask = result.valid if allowed is None else (result.valid & allowed)
    if not mask.any():
        return None
    masked = np.where(mask, gain, -np.inf)
    per_feature = masked.max(axis=0)
    feature = int(np.argmax(per_feature))
    position = int(np.argmax(masked[:, feature]))
    lo = result.sorted_values[position, feature]
    hi = result.sorted_values[position + 1, feature]
    return Split(feature=feature, threshold=float(0.5 * (lo + hi)), gain=float(masked[position, feature]))
