"""Multiclass gradient-boosted regression trees with second-order leaf fitting."""

import logging
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import splitting
from .config import BoostParams
from .exceptions import DatasetError, DimensionMismatch, NgnBoostError

logger = logging.getLogger(__name__)

_HESS_FLOOR = 1e-16
_MIN_GAIN = 1e-12
_FORMAT_HEADER = "ngnboost-ensemble v1"


@dataclass(frozen=True)
class RegressionTree:
    """Binary tree stored in preorder arrays; feature == -1 marks a leaf.

    Rows with x[feature] <= threshold go left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_internal(self) -> int:
        return int((self.feature >= 0).sum())

    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(int(self.left[node])), walk(int(self.right[node])))

        return walk(0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])
            active = active[self.feature[node[active]] >= 0]
        return self.value[node]


class _TreeRecorder:
    """Collects nodes in preorder while a tree grows."""

    def __init__(self) -> None:
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def freeze(self) -> RegressionTree:
        return RegressionTree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=float),
        )


def leaf_weight(G: float, H: float, reg_lambda: float) -> float:
    denominator = H + reg_lambda
    return 0.0 if denominator <= 0 else -G / denominator


def _best_split(
    X: np.ndarray, stats: np.ndarray, order: np.ndarray, params: BoostParams
) -> Optional[splitting.Split]:
    result = splitting.scan_sorted(X, stats, order)
    G, H = result.total
    GL, HL = result.left[..., 0], result.left[..., 1]
    GR, HR = G - GL, H - HL
    lam = params.reg_lambda
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = 0.5 * (
            GL**2 / np.maximum(HL + lam, _HESS_FLOOR)
            + GR**2 / np.maximum(HR + lam, _HESS_FLOOR)
            - G**2 / max(H + lam, _HESS_FLOOR)
        ) - params.gamma_min_gain
    allowed = (HL >= params.min_child_weight) & (HR >= params.min_child_weight)
    split = splitting.pick(result, gain, allowed)
    if split is None or not split.gain > _MIN_GAIN:
        return None
    return split


def build_tree(
    X: np.ndarray, g: np.ndarray, h: np.ndarray, params: BoostParams, order: Optional[np.ndarray] = None
) -> RegressionTree:
    """Exact greedy regression tree on gradient/hessian statistics.

    Splits while depth < max_depth, gain > 0 and both children keep a hessian
    sum of at least min_child_weight; leaves carry -G / (H + reg_lambda).
    `order` is splitting.presort(X), computed here when not given.
    """
    X = np.asarray(X, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape[0] != X.shape[0] or h.shape[0] != X.shape[0]:
        raise DimensionMismatch("gradient and hessian lengths must equal the row count")
    if order is None:
        order = splitting.presort(X)
    stats = np.column_stack([g, h])
    recorder = _TreeRecorder()

    def grow(rows: np.ndarray, node_order: np.ndarray, depth: int) -> int:
        node = recorder.add()
        G, H = float(g[rows].sum()), float(h[rows].sum())
        split = None
        if depth < params.max_depth and rows.size >= 2 and H >= 2 * params.min_child_weight:
            split = _best_split(X, stats, node_order, params)
        if split is None:
            recorder.value[node] = leaf_weight(G, H, params.reg_lambda)
            return node
        goes_left = X[rows, split.feature] <= split.threshold
        member = np.zeros(X.shape[0], dtype=bool)
        member[rows[goes_left]] = True
        recorder.feature[node] = split.feature
        recorder.threshold[node] = split.threshold
        recorder.left[node] = grow(rows[goes_left], splitting.restrict(node_order, member), depth + 1)
        recorder.right[node] = grow(rows[~goes_left], splitting.restrict(node_order, ~member), depth + 1)
        return node

    grow(np.arange(X.shape[0]), order, 0)
    return recorder.freeze()


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def softmax_grad_hess(p: np.ndarray, y: int | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient p - onehot(y) and diagonal hessian p * (1 - p) of cross-entropy.

    Works on a single probability row with an integer class, or on an (n, K)
    matrix with a label vector.
    """
    p = np.asarray(p, dtype=float)
    onehot = np.zeros_like(p)
    if p.ndim == 1:
        onehot[int(y)] = 1.0
    else:
        onehot[np.arange(p.shape[0]), np.asarray(y, dtype=np.int64)] = 1.0
    return p - onehot, p * (1.0 - p)


@dataclass(frozen=True)
class BoostEnsemble:
    """trees[round][class]; class score = sum over rounds of learning_rate * tree(x)."""

    trees: tuple[tuple[RegressionTree, ...], ...]
    params: BoostParams
    n_classes: int
    n_features: int

    @property
    def n_rounds(self) -> int:
        return len(self.trees)


def fit(X: np.ndarray, y: np.ndarray, params: BoostParams = BoostParams(), n_classes: Optional[int] = None) -> BoostEnsemble:
    """Round-robin softmax boosting: one tree per class per round."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DatasetError("cannot boost on empty data")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if np.unique(y).size < 2:
        raise DatasetError("boosting needs at least two classes in the labels")
    K = n_classes if n_classes is not None else int(y.max()) + 1

    scores = np.zeros((X.shape[0], K))
    order = splitting.presort(X)
    rounds = []
    for r in range(params.n_rounds):
        g, h = softmax_grad_hess(softmax(scores), y)
        h = np.maximum(h, _HESS_FLOOR)
        round_trees = tuple(build_tree(X, g[:, k], h[:, k], params, order) for k in range(K))
        for k, tree in enumerate(round_trees):
            scores[:, k] += params.learning_rate * tree.predict(X)
        rounds.append(round_trees)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"boost round {r + 1}/{params.n_rounds}: train loss {_cross_entropy(scores, y):.6f}")
    return BoostEnsemble(trees=tuple(rounds), params=params, n_classes=K, n_features=X.shape[1])


def predict_scores(model: BoostEnsemble, X: np.ndarray, n_rounds: Optional[int] = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model trained on {model.n_features} features, got shape {X.shape}")
    scores = np.zeros((X.shape[0], model.n_classes))
    for round_trees in model.trees[:n_rounds]:
        for k, tree in enumerate(round_trees):
            scores[:, k] += model.params.learning_rate * tree.predict(X)
    return scores


def predict_proba(model: BoostEnsemble, X: np.ndarray, n_rounds: Optional[int] = None) -> np.ndarray:
    """Softmax of the class scores (optionally of the first n_rounds rounds only)."""
    return softmax(predict_scores(model, X, n_rounds))


def predict(model: BoostEnsemble, X: np.ndarray) -> np.ndarray:
    """Argmax class; np.argmax resolves ties to the lowest index."""
    return np.argmax(predict_proba(model, X), axis=1)


def _cross_entropy(scores: np.ndarray, y: np.ndarray) -> float:
    p = softmax(scores)
    return float(-np.mean(np.log(np.maximum(p[np.arange(y.shape[0]), y], 1e-300))))


def cross_entropy(model: BoostEnsemble, X: np.ndarray, y: np.ndarray, n_rounds: Optional[int] = None) -> float:
    """Mean negative log-likelihood of the true labels."""
    return _cross_entropy(predict_scores(model, X, n_rounds), np.asarray(y, dtype=np.int64))


def dumps(model: BoostEnsemble) -> str:
    """Preorder text dump: one `split <feature> <threshold>` or `leaf <weight>` line per node."""
    lines = [
        _FORMAT_HEADER,
        f"n_classes {model.n_classes}",
        f"n_features {model.n_features}",
        "params " + " ".join(f"{f.name}={getattr(model.params, f.name)!r}" for f in fields(BoostParams)),
    ]
    for r, round_trees in enumerate(model.trees):
        for k, tree in enumerate(round_trees):
            lines.append(f"tree round={r} class={k} nodes={tree.n_nodes}")
            for node in range(tree.n_nodes):
                if tree.feature[node] >= 0:
                    lines.append(f"split {int(tree.feature[node])} {float(tree.threshold[node])!r}")
                else:
                    lines.append(f"leaf {float(tree.value[node])!r}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> BoostEnsemble:
    """Inverse of dumps."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != _FORMAT_HEADER:
        raise NgnBoostError("not an ngnboost ensemble dump")
    n_classes = int(lines[1].split()[1])
    n_features = int(lines[2].split()[1])
    raw = dict(item.split("=", 1) for item in lines[3].split()[1:])
    types = {f.name: f.type for f in fields(BoostParams)}
    params = BoostParams(**{name: (int if types[name] in (int, "int") else float)(value) for name, value in raw.items()})

    trees: list[RegressionTree] = []
    position = 4
    while position < len(lines):
        header = dict(item.split("=", 1) for item in lines[position].split()[1:])
        n_nodes = int(header["nodes"])
        body = lines[position + 1 : position + 1 + n_nodes]
        position += 1 + n_nodes
        recorder = _TreeRecorder()
        cursor = iter(body)

        def read() -> int:
            node = recorder.add()
            kind, *values = next(cursor).split()
            if kind == "leaf":
                recorder.value[node] = float(values[0])
                return node
            recorder.feature[node] = int(values[0])
            recorder.threshold[node] = float(values[1])
            recorder.left[node] = read()
            recorder.right[node] = read()
            return node

        read()
        trees.append(recorder.freeze())

    grid = tuple(tuple(trees[r * n_classes : (r + 1) * n_classes]) for r in range(len(trees) // n_classes))
    return BoostEnsemble(trees=grid, params=params, n_classes=n_classes, n_features=n_features)
