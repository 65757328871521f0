"""Least-squares gradient-boosted regression trees, one model per target.

Trees are grown by exact greedy variance reduction over sorted candidate
thresholds; the forest is stored packed in flat node arrays so prediction is
a single kernel call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import TabularDataset
from ..errors import HyperparameterError
from ..kernels import forest_predict, gbt_best_split

DEFAULT_GBT_HP = {
    "n_trees": 200,
    "max_depth": 3,
    "learning_rate": 0.1,
    "min_samples_leaf": 2,
}

GBT_HP_RANGES = {
    "n_trees": (0, 5000),
    "max_depth": (1, 16),
    "learning_rate": (1e-6, 1.0),
    "min_samples_leaf": (1, 100000),
}


def validate_gbt_hp(hp: dict) -> dict:
    merged = dict(DEFAULT_GBT_HP)
    for key, value in hp.items():
        if key not in GBT_HP_RANGES:
            raise HyperparameterError(f"unknown gbt hyperparameter {key!r}")
        merged[key] = value
    for key, (lo, hi) in GBT_HP_RANGES.items():
        v = merged[key]
        if not (lo <= v <= hi):
            raise HyperparameterError(f"gbt {key}={v} outside [{lo}, {hi}]")
    for key in ("n_trees", "max_depth", "min_samples_leaf"):
        merged[key] = int(merged[key])
    merged["learning_rate"] = float(merged["learning_rate"])
    return merged


@dataclass(frozen=True)
class GBTModel:
    """A packed boosted forest predicting one target.

    ``feature`` is -1 at leaves; child links index into the packed arrays.
    ``offsets[t]`` is the root node of tree t. ``feature_gains`` accumulates
    the SSE reduction of every split, per feature.
    """

    n_features: int
    learning_rate: float
    base_prediction: float
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    offsets: np.ndarray
    feature_gains: np.ndarray
    max_depth: int
    train_mse_path: tuple[float, ...]

    @property
    def n_trees(self) -> int:
        return len(self.offsets) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} feature columns, got {X.shape[1]}")
        return forest_predict(
            self.feature,
            self.threshold,
            self.left,
            self.right,
            self.value,
            self.offsets,
            X,
            self.learning_rate,
            self.base_prediction,
        )


class _TreeBuilder:
    def __init__(self, X, max_depth, min_samples_leaf, gains):
        self.X = X
        self.max_depth = max_depth
        self.min_leaf = min_samples_leaf
        self.gains = gains
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []
        self.train_pred = np.zeros(X.shape[0])

    def grow(self, idx: np.ndarray, residuals: np.ndarray, depth: int) -> int:
        node = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        r = residuals[idx]
        self.value.append(float(r.mean()))
        if depth >= self.max_depth or idx.size < max(2, 2 * self.min_leaf):
            self.train_pred[idx] = self.value[node]
            return node
        # a constant node cannot be improved; any apparent gain on it is
        # summation round-off, which would corrupt the per-feature gains
        if r.min() == r.max():
            self.train_pred[idx] = self.value[node]
            return node
        # gains below the accumulated round-off of the sum-of-squares
        # formula are noise, not structure
        min_gain = float(np.sum(r * r)) * idx.size * 8.0 * np.finfo(np.float64).eps
        f, thr, gain = gbt_best_split(
            np.ascontiguousarray(self.X[idx]), np.ascontiguousarray(r), self.min_leaf, min_gain
        )
        if f < 0:
            self.train_pred[idx] = self.value[node]
            return node
        self.gains[f] += gain
        go_left = self.X[idx, f] <= thr
        self.feature[node] = int(f)
        self.threshold[node] = float(thr)
        left_child = self.grow(idx[go_left], residuals, depth + 1)
        self.left[node] = left_child
        self.right[node] = self.grow(idx[~go_left], residuals, depth + 1)
        return node


def train_gbt(train: TabularDataset, target_index: int, hp: dict, seed: int = 0) -> GBTModel:
    """Boost regression trees on one target column.

    Stage t fits the residuals of the current model; predictions advance by
    ``learning_rate`` times the new tree. The recorded training MSE path is
    non-increasing. ``seed`` is accepted for interface uniformity; exact
    greedy fitting is deterministic.
    """
    hp = validate_gbt_hp(hp)
    if not (0 <= target_index < train.n_targets):
        raise ValueError(f"target_index {target_index} out of range")
    n = train.n_rows
    if n < 2:
        raise ValueError("gbt training needs at least 2 rows")
    X = np.ascontiguousarray(train.features)
    y = train.targets[:, target_index].copy()
    d = train.n_features

    base = float(y.mean())
    pred = np.full(n, base)
    mse_path = [float(((y - pred) ** 2).mean())]
    gains = np.zeros(d)

    feature_parts, threshold_parts, left_parts, right_parts, value_parts = [], [], [], [], []
    offsets = [0]
    all_idx = np.arange(n)
    lr = hp["learning_rate"]
    for _ in range(hp["n_trees"]):
        residuals = y - pred
        builder = _TreeBuilder(X, hp["max_depth"], hp["min_samples_leaf"], gains)
        builder.grow(all_idx, residuals, 0)
        pred = pred + lr * builder.train_pred
        mse_path.append(float(((y - pred) ** 2).mean()))
        offset = offsets[-1]
        n_nodes = len(builder.feature)
        la = np.asarray(builder.left, dtype=np.int64)
        ra = np.asarray(builder.right, dtype=np.int64)
        la[la >= 0] += offset
        ra[ra >= 0] += offset
        feature_parts.append(np.asarray(builder.feature, dtype=np.int64))
        threshold_parts.append(np.asarray(builder.threshold, dtype=np.float64))
        left_parts.append(la)
        right_parts.append(ra)
        value_parts.append(np.asarray(builder.value, dtype=np.float64))
        offsets.append(offset + n_nodes)

    def _cat(parts, dtype):
        if parts:
            return np.concatenate(parts).astype(dtype)
        return np.empty(0, dtype=dtype)

    return GBTModel(
        n_features=d,
        learning_rate=lr,
        base_prediction=base,
        feature=_cat(feature_parts, np.int64),
        threshold=_cat(threshold_parts, np.float64),
        left=_cat(left_parts, np.int64),
        right=_cat(right_parts, np.int64),
        value=_cat(value_parts, np.float64),
        offsets=np.asarray(offsets, dtype=np.int64),
        feature_gains=gains,
        max_depth=hp["max_depth"],
        train_mse_path=tuple(mse_path),
    )
