"""The trained-surrogate bundle: one object predicting all m targets."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .._seeding import TAG_TRAIN, seed_for
from ..dataset import TabularDataset
from .ensemble import EnsembleModel
from .gbt import GBTModel, train_gbt
from .mlp import MLPModel, train_mlp

KINDS = ("gbt", "mlp", "ensemble")


@dataclass
class TrainingRecord:
    hyperparameters: dict
    seed: int
    cv_score: Optional[float] = None
    wall_time_s: float = 0.0
    label: str = ""


@dataclass
class TrainedSurrogate:
    """Immutable regressor bundle mapping a design vector to m objectives."""

    kind: str
    model: object  # tuple[GBTModel] | MLPModel | EnsembleModel
    record: TrainingRecord
    target_names: tuple[str, ...]

    @property
    def n_targets(self) -> int:
        return len(self.target_names)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.kind == "gbt":
            return np.column_stack([tree.predict(X) for tree in self.model])
        return np.atleast_2d(self.model.predict(X))


def train_model(
    train: TabularDataset, kind: str, hp: dict, seed: int, label: str = ""
) -> TrainedSurrogate:
    """Train a gbt or mlp bundle on every target of the dataset."""
    t0 = time.perf_counter()
    if kind == "gbt":
        models = tuple(
            train_gbt(train, j, hp, seed_for(seed, TAG_TRAIN, j)) for j in range(train.n_targets)
        )
        model: object = models
    elif kind == "mlp":
        model = train_mlp(train, hp, seed_for(seed, TAG_TRAIN))
    else:
        raise ValueError(f"train_model handles gbt/mlp, got {kind!r}")
    record = TrainingRecord(
        hyperparameters=dict(hp),
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
        label=label or kind,
    )
    return TrainedSurrogate(kind, model, record, train.target_names)


def wrap_ensemble(ensemble: EnsembleModel, target_names, seed: int, label: str = "ensemble"):
    record = TrainingRecord(
        hyperparameters={"n_members": len(ensemble.members)}, seed=seed, label=label
    )
    return TrainedSurrogate("ensemble", ensemble, record, tuple(target_names))
