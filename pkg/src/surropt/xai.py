"""Model explanation: feature relevances and partial dependence.

Gain importance reads accumulated split gains out of a boosted-tree model;
permutation importance is the model-agnostic counterpart so MLP and ensemble
relevances land on the same normalized scale. Both sum to 1 unless the model
ignores every feature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._seeding import TAG_XAI, rng_for
from .dataset import TabularDataset
from .surrogate.gbt import GBTModel


@dataclass(frozen=True)
class ImportanceVector:
    values: np.ndarray
    method: str  # gain | permutation

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if (v < 0).any():
            raise ValueError("importances must be nonnegative")
        total = v.sum()
        if total > 0 and abs(total - 1.0) > 1e-9:
            raise ValueError("importances must sum to 1 (or be all-zero)")


@dataclass(frozen=True)
class PDPCurve:
    features: tuple[int, ...]
    grids: tuple[np.ndarray, ...]  # one strictly increasing grid per feature
    response: np.ndarray  # (g, m) for one feature, (g, g, m) for a pair
    target_names: tuple[str, ...]


def _normalize(raw: np.ndarray, method: str) -> ImportanceVector:
    raw = np.maximum(raw, 0.0)
    total = raw.sum()
    if total > 0:
        raw = raw / total
    return ImportanceVector(raw, method)


def gain_importance(model: GBTModel) -> ImportanceVector:
    """Relevance proportional to accumulated split gain; all-zero if the
    forest never split."""
    if not isinstance(model, GBTModel):
        raise TypeError("gain importance is defined for boosted-tree models only")
    return _normalize(model.feature_gains.copy(), "gain")


def permutation_importance(
    model, data: TabularDataset, target_index: int, repeats: int = 5, seed: int = 0
) -> ImportanceVector:
    """Mean MSE increase on one target when a feature column is shuffled."""
    if data.n_rows < 1:
        raise ValueError("need a non-empty dataset")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    X = data.features
    y = data.targets[:, target_index]
    base_mse = float(((y - model.predict(X)[:, target_index]) ** 2).mean())
    raw = np.zeros(data.n_features)
    for j in range(data.n_features):
        increases = np.empty(repeats)
        for r in range(repeats):
            rng = rng_for(seed, TAG_XAI, j, r)
            Xp = X.copy()
            Xp[:, j] = Xp[rng.permutation(data.n_rows), j]
            mse = float(((y - model.predict(Xp)[:, target_index]) ** 2).mean())
            increases[r] = mse - base_mse
        raw[j] = increases.mean()
    return _normalize(raw, "permutation")


def partial_dependence(
    model, data: TabularDataset, features, grid_size: int = 20
) -> PDPCurve:
    """Average prediction as one or two features sweep an observed-range grid
    while every other feature keeps its dataset values."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if data.n_rows < 1:
        raise ValueError("need a non-empty dataset")
    if isinstance(features, (int, np.integer)):
        features = (int(features),)
    else:
        features = tuple(int(f) for f in features)
    if len(features) not in (1, 2):
        raise ValueError("partial dependence takes one or two features")
    if len(set(features)) != len(features):
        raise ValueError("duplicate feature indices")

    grids = []
    for f in features:
        col = data.features[:, f]
        grids.append(np.linspace(col.min(), col.max(), grid_size))

    m = data.n_targets
    if len(features) == 1:
        response = np.empty((grid_size, m))
        for gi, v in enumerate(grids[0]):
            X = data.features.copy()
            X[:, features[0]] = v
            response[gi] = model.predict(X).mean(axis=0)
    else:
        response = np.empty((grid_size, grid_size, m))
        for gi, v0 in enumerate(grids[0]):
            for gj, v1 in enumerate(grids[1]):
                X = data.features.copy()
                X[:, features[0]] = v0
                X[:, features[1]] = v1
                response[gi, gj] = model.predict(X).mean(axis=0)
    return PDPCurve(features, tuple(grids), response, data.target_names)


def write_importances_csv(rows, path) -> None:
    """Rows of (feature, target, method, value, model-label) to CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "target", "method", "value", "model"])
        for feature, target, method, value, model_label in rows:
            writer.writerow([feature, target, method, repr(float(value)), model_label])


def write_pdp_csv(curve: PDPCurve, target_index: int, path) -> None:
    """One-feature curve for one target as (grid, response) columns."""
    if len(curve.features) != 1:
        raise ValueError("csv export covers single-feature curves")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "response"])
        for v, r in zip(curve.grids[0], curve.response[:, target_index]):
            writer.writerow([repr(float(v)), repr(float(r))])
