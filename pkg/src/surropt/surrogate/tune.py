"""Hyperparameter search: deterministic random search over declared spaces,
scored by k-fold cross-validation.

The sampling strategy sits behind ``sample_hyperparameters`` so a model-based
search can be slotted in later without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._seeding import TAG_CV_FOLD, TAG_TUNE, rng_for, seed_for
from ..dataset import TabularDataset
from ..errors import TrainingDivergedError
from .bundle import train_model

# Parameter specs: ("uniform", lo, hi) | ("loguniform", lo, hi)
#                | ("int", lo, hi) | ("choice", (options...))
DEFAULT_SPACES = {
    "gbt": {
        "n_trees": ("int", 50, 500),
        "max_depth": ("int", 2, 6),
        "learning_rate": ("loguniform", 0.03, 0.3),
        "min_samples_leaf": ("int", 1, 20),
    },
    "mlp": {
        "hidden_sizes": ("choice", ((32,), (64,), (128,), (64, 64))),
        "activation": ("choice", ("relu",)),
        "learning_rate": ("loguniform", 3e-3, 0.3),
        "epochs": ("choice", (200, 500, 1000)),
        "weight_decay": ("loguniform", 1e-8, 1e-3),
    },
    # The second deep configuration: deeper tanh networks.
    "mlp2": {
        "hidden_sizes": ("choice", ((64, 64), (128, 64), (128, 128))),
        "activation": ("choice", ("tanh",)),
        "learning_rate": ("loguniform", 3e-3, 0.3),
        "epochs": ("choice", (500, 1000)),
        "weight_decay": ("loguniform", 1e-8, 1e-3),
    },
}

# Pipeline-facing model labels map onto the two trainable kinds.
BASE_KIND = {"gbt": "gbt", "mlp": "mlp", "mlp2": "mlp"}


@dataclass
class Trial:
    index: int
    hyperparameters: dict
    score: float


@dataclass
class TuneResult:
    best: dict
    trials: list[Trial]

    @property
    def best_score(self) -> float:
        return min(t.score for t in self.trials)


def sample_hyperparameters(space: dict, rng: np.random.Generator) -> dict:
    """Draw one configuration; parameters are visited in sorted name order so
    the draw sequence is reproducible."""
    if not space:
        raise ValueError("empty search space")
    hp = {}
    for name in sorted(space):
        spec = space[name]
        kind = spec[0]
        if kind == "uniform":
            hp[name] = float(rng.uniform(spec[1], spec[2]))
        elif kind == "loguniform":
            hp[name] = float(np.exp(rng.uniform(np.log(spec[1]), np.log(spec[2]))))
        elif kind == "int":
            hp[name] = int(rng.integers(spec[1], spec[2] + 1))
        elif kind == "choice":
            hp[name] = spec[1][int(rng.integers(len(spec[1]))) ]
        else:
            raise ValueError(f"unknown parameter spec {spec!r}")
    return hp


def cross_validate(
    train: TabularDataset, model_kind: str, hp: dict, k: int, seed: int
) -> float:
    """Mean validation MSE over k deterministic folds (all targets jointly)."""
    n = train.n_rows
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available rows")
    base = BASE_KIND.get(model_kind, model_kind)
    perm = rng_for(seed, TAG_CV_FOLD).permutation(n)
    folds = np.array_split(perm, k)
    scores = []
    for i, fold in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        sub = train.rows(np.nonzero(mask)[0])
        model = train_model(sub, base, hp, seed_for(seed, TAG_CV_FOLD, i))
        pred = model.predict(train.features[fold])
        scores.append(float(((train.targets[fold] - pred) ** 2).mean()))
    return float(np.mean(scores))


def tune(
    train: TabularDataset,
    model_kind: str,
    search_space: dict | None,
    budget: int,
    k: int,
    seed: int,
) -> TuneResult:
    """Random search: evaluate ``budget`` sampled configurations, return the
    argmin (first trial wins ties). Diverging trials score +inf."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    space = search_space if search_space is not None else DEFAULT_SPACES[model_kind]
    if not space:
        raise ValueError("empty search space")
    rng = rng_for(seed, TAG_TUNE)
    trials = []
    best_idx = 0
    best_score = np.inf
    for t in range(budget):
        hp = sample_hyperparameters(space, rng)
        try:
            score = cross_validate(train, model_kind, hp, k, seed_for(seed, TAG_TUNE, t))
        except TrainingDivergedError:
            score = np.inf
        trials.append(Trial(t, hp, score))
        if score < best_score:
            best_score = score
            best_idx = t
    return TuneResult(best=dict(trials[best_idx].hyperparameters), trials=trials)
