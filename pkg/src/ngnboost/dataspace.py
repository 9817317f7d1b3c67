"""Tabular dataset ingestion, standardization, splitting and synthesis."""

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .config import SplitSpec
from .exceptions import DatasetError, DimensionMismatch, SplitError

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-9

BANDS = ("theta", "alpha", "low_beta", "high_beta", "gamma")
ELECTRODES = ("AF3", "T7", "Pz", "T8", "AF4")
RISK_CLASS_NAMES = ("High Risk", "Medium Risk", "Normal", "Low Risk")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer class labels 0..n_classes-1."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    n_classes: int

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {features.shape}")
        if features.shape[0] != labels.shape[0]:
            raise DatasetError(f"{features.shape[0]} feature rows but {labels.shape[0]} labels")
        if features.shape[1] != len(self.feature_names):
            raise DatasetError(f"{features.shape[1]} feature columns but {len(self.feature_names)} names")
        if self.n_classes < 1:
            raise DatasetError(f"n_classes must be positive, got {self.n_classes}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DatasetError(f"labels must lie in 0..{self.n_classes - 1}")
        if not np.all(np.isfinite(features)):
            raise DatasetError("features contain non-finite values")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def check_all_classes(self) -> None:
        """Raise unless every class 0..K-1 has at least one row."""
        missing = np.flatnonzero(self.class_counts() == 0)
        if missing.size:
            raise DatasetError(f"classes without rows: {missing.tolist()}")

    def subset(self, rows: np.ndarray) -> "Dataset":
        return replace(self, features=self.features[rows], labels=self.labels[rows])

    def with_features(self, features: np.ndarray, feature_names: Optional[Sequence[str]] = None) -> "Dataset":
        names = tuple(feature_names) if feature_names is not None else self.feature_names
        return replace(self, features=features, feature_names=names)


@dataclass(frozen=True)
class StandardizerModel:
    """Per-feature z-score statistics."""

    means: np.ndarray
    stds: np.ndarray


def risk_labels_from_valence(valence: Sequence[float]) -> np.ndarray:
    """Map 1..7 valence ratings onto the four risk classes.

    1 -> 0 (High Risk), 2-3 -> 1 (Medium Risk), 4-5 -> 2 (Normal), 6-7 -> 3 (Low Risk).
    """
    values = np.asarray(valence, dtype=float)
    bad = np.flatnonzero((values < 1) | (values > 7) | (values != np.round(values)))
    if bad.size:
        raise DatasetError(f"valence must be an integer in 1..7, got {values[bad[0]]}", row=int(bad[0]) + 2)
    return np.searchsorted([1, 3, 5], values.astype(np.int64), side="left").astype(np.int64)


def load_csv(
    path: str | Path,
    *,
    label_column: str = "label",
    valence_column: Optional[str] = None,
    n_classes: Optional[int] = None,
) -> Dataset:
    """Load a headered CSV with one integer label column.

    All other columns become features in header order. Row numbers in errors
    are file line numbers (the header is line 1).
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding="utf-8")
    except FileNotFoundError as e:
        raise DatasetError(f"file not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise DatasetError(f"empty file: {path}") from e

    # header=None keeps repeated names as written
    columns = [str(c) for c in raw.iloc[0]]
    frame = raw.iloc[1:].reset_index(drop=True)
    if label_column in columns:
        label_source = label_column
    elif valence_column is not None and valence_column in columns:
        label_source = valence_column
    else:
        raise DatasetError(f"label column not found: '{label_column}'")
    if columns.count(label_source) != 1:
        raise DatasetError(f"duplicate label column '{label_source}'")
    repeated = sorted({c for c in columns if columns.count(c) > 1})
    if repeated:
        raise DatasetError(f"duplicate column names: {', '.join(repeated)}")
    frame.columns = columns
    if frame.shape[0] == 0:
        raise DatasetError(f"no data rows in {path}")

    raw_labels = _numeric_column(frame[label_source], label_source)
    if label_source == label_column:
        non_integer = np.flatnonzero(raw_labels != np.round(raw_labels))
        if non_integer.size:
            raise DatasetError("label is not an integer", row=int(non_integer[0]) + 2, column=label_source)
        labels = raw_labels.astype(np.int64)
    else:
        labels = risk_labels_from_valence(raw_labels)

    k = n_classes if n_classes is not None else int(labels.max()) + 1
    out_of_range = np.flatnonzero((labels < 0) | (labels >= k))
    if out_of_range.size:
        row = int(out_of_range[0])
        raise DatasetError(f"label {labels[row]} outside 0..{k - 1}", row=row + 2, column=label_source)

    drop = {label_source}
    if valence_column is not None:
        drop.add(valence_column)
    feature_names = [c for c in columns if c not in drop]
    if not feature_names:
        raise DatasetError("no feature columns")
    features = np.column_stack([_numeric_column(frame[name], name) for name in feature_names])

    dataset = Dataset(features=features, labels=labels, feature_names=tuple(feature_names), n_classes=k)
    dataset.check_all_classes()
    logger.info(f"Loaded {dataset.n_samples} rows x {dataset.n_features} features, {k} classes from {path}")
    return dataset


def _numeric_column(column: pd.Series, name: str) -> np.ndarray:
    values = pd.to_numeric(column.str.strip(), errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        raise DatasetError(f"non-numeric or non-finite value '{column.iloc[row]}'", row=row + 2, column=name)
    return values


def write_csv(dataset: Dataset, path: str | Path, label_column: str = "label") -> Path:
    """Persist a dataset in the load_csv format."""
    path = Path(path)
    frame = pd.DataFrame(dataset.features, columns=list(dataset.feature_names))
    frame[label_column] = dataset.labels
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8")
    return path


def fit_standardizer(train: Dataset) -> StandardizerModel:
    """Population mean and std of each column, std floored at STD_FLOOR."""
    if train.n_samples == 0:
        raise DatasetError("cannot fit a standardizer on an empty dataset")
    means = train.features.mean(axis=0)
    stds = train.features.std(axis=0)
    floored = stds < STD_FLOOR
    if floored.any():
        logger.warning(f"{int(floored.sum())} constant column(s) hit the std floor")
    return StandardizerModel(means=means, stds=np.maximum(stds, STD_FLOOR))


def apply_standardizer(model: StandardizerModel, data: Dataset) -> Dataset:
    if data.n_features != model.means.shape[0]:
        raise DimensionMismatch(f"standardizer fitted on {model.means.shape[0]} features, got {data.n_features}")
    return data.with_features((data.features - model.means) / model.stds)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_indices(labels: np.ndarray, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint sorted (train, test) row indices covering every row."""
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    n_train = round_half_up(spec.train_ratio * n)
    rng = np.random.default_rng(spec.seed)

    if not spec.stratified:
        order = rng.permutation(n)
        return np.sort(order[:n_train]), np.sort(order[n_train:])

    classes, counts = np.unique(labels, return_counts=True)
    small = classes[counts < 2]
    if small.size:
        raise SplitError(f"stratified split needs >= 2 rows per class; class {int(small[0])} has fewer")

    # Largest-remainder allocation keeps every class within one row of its share.
    exact = spec.train_ratio * counts
    per_class = np.clip(np.floor(exact).astype(np.int64), 1, counts - 1)
    remainder = n_train - int(per_class.sum())
    if remainder > 0:
        order = np.lexsort((classes, -(exact - np.floor(exact))))
        for i in order:
            if remainder == 0:
                break
            if per_class[i] < counts[i] - 1:
                per_class[i] += 1
                remainder -= 1
    elif remainder < 0:
        order = np.lexsort((classes, exact - np.floor(exact)))
        for i in order:
            if remainder == 0:
                break
            if per_class[i] > 1:
                per_class[i] -= 1
                remainder += 1

    train_parts = []
    test_parts = []
    for cls, take in zip(classes, per_class):
        rows = rng.permutation(np.flatnonzero(labels == cls))
        train_parts.append(rows[:take])
        test_parts.append(rows[take:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(test_parts))


def split(data: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded (optionally stratified) train/test partition."""
    train_rows, test_rows = split_indices(data.labels, spec)
    return data.subset(train_rows), data.subset(test_rows)


def default_feature_names(d: int) -> tuple[str, ...]:
    if d == len(BANDS) * len(ELECTRODES):
        return tuple(f"{band}_{electrode}" for electrode in ELECTRODES for band in BANDS)
    return tuple(f"f{j}" for j in range(d))


def synth(n: int = 600, d: int = 25, k: int = 4, separation: float = 3.0, seed: int = 7) -> Dataset:
    """Gaussian class clusters with unit-variance noise in every dimension.

    With k <= d, feature j carries class j % k: that class is centered at
    `separation` on it and every other class at 0, so each class owns a block
    of d // k or more signal features and any two centers are `separation`
    apart along each of their signal features. With k > d the centers are
    spaced `separation` apart along the first axis.
    """
    if d < 1:
        raise DatasetError(f"d must be >= 1, got {d}")
    if k < 1 or n < k:
        raise DatasetError(f"need n >= k >= 1, got n={n}, k={k}")
    rng = np.random.default_rng(seed)

    centers = np.zeros((k, d))
    if k <= d:
        columns = np.arange(d)
        centers[columns % k, columns] = separation
    else:
        centers[:, 0] = separation * np.arange(k)

    labels = rng.permutation(np.arange(n) % k)
    features = centers[labels] + rng.standard_normal((n, d))
    return Dataset(features=features, labels=labels, feature_names=default_feature_names(d), n_classes=k)
