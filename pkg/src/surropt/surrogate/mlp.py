"""Multi-output MLP regressor trained by mini-batch gradient descent on MSE.

Inputs and outputs are standard-scaled internally; predictions are returned
in original target units. Everything is float64 numpy so the analytic
gradients can be checked against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import Scaler, TabularDataset, fit_scaler
from ..errors import HyperparameterError, TrainingDivergedError

DEFAULT_MLP_HP = {
    "hidden_sizes": (64,),
    "activation": "relu",
    "learning_rate": 1e-3,
    "epochs": 500,
    "batch_size": 0,  # 0: full batch below 1024 rows, else 256
    "weight_decay": 0.0,
}

MLP_HP_RANGES = {
    "learning_rate": (1e-8, 10.0),
    "epochs": (0, 100000),
    "batch_size": (0, 1 << 20),
    "weight_decay": (0.0, 1.0),
}


def validate_mlp_hp(hp: dict) -> dict:
    merged = dict(DEFAULT_MLP_HP)
    for key, value in hp.items():
        if key not in merged:
            raise HyperparameterError(f"unknown mlp hyperparameter {key!r}")
        merged[key] = value
    for key, (lo, hi) in MLP_HP_RANGES.items():
        if not (lo <= merged[key] <= hi):
            raise HyperparameterError(f"mlp {key}={merged[key]} outside [{lo}, {hi}]")
    if merged["activation"] not in ("relu", "tanh"):
        raise HyperparameterError(f"mlp activation must be relu or tanh")
    hidden = tuple(int(h) for h in merged["hidden_sizes"])
    if not hidden or any(h < 1 for h in hidden):
        raise HyperparameterError("hidden_sizes must be a non-empty tuple of positive ints")
    merged["hidden_sizes"] = hidden
    merged["epochs"] = int(merged["epochs"])
    merged["batch_size"] = int(merged["batch_size"])
    return merged


def _act(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _act_grad(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return (z > 0.0).astype(np.float64)
    t = np.tanh(z)
    return 1.0 - t * t


def forward(weights, biases, activation: str, X: np.ndarray) -> np.ndarray:
    """Network output for already-scaled inputs."""
    a = X
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        a = z if i == last else _act(z, activation)
    return a


def loss_and_gradients(weights, biases, activation, X, Y, weight_decay=0.0):
    """MSE loss (plus L2 penalty) and its gradients w.r.t. all parameters."""
    n, m = Y.shape
    zs = []
    acts = [X]
    a = X
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        zs.append(z)
        a = z if i == last else _act(z, activation)
        acts.append(a)
    err = acts[-1] - Y
    loss = float((err**2).mean())
    if weight_decay:
        loss += 0.5 * weight_decay * sum(float((W**2).sum()) for W in weights)
    delta = 2.0 * err / (n * m)
    grads_W = [None] * len(weights)
    grads_b = [None] * len(weights)
    for i in range(last, -1, -1):
        grads_W[i] = acts[i].T @ delta
        if weight_decay:
            grads_W[i] = grads_W[i] + weight_decay * weights[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * _act_grad(zs[i - 1], activation)
    return loss, grads_W, grads_b


def init_parameters(layer_sizes, activation, rng):
    """He initialization for relu, Xavier for tanh; zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        gain = np.sqrt(2.0 / fan_in) if activation == "relu" else np.sqrt(1.0 / fan_in)
        weights.append(rng.normal(0.0, gain, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


@dataclass
class MLPModel:
    layer_sizes: tuple[int, ...]
    weights: list
    biases: list
    activation: str
    input_scaler: Scaler
    output_scaler: Scaler

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"expected {self.layer_sizes[0]} feature columns, got {X.shape[1]}")
        out = forward(self.weights, self.biases, self.activation, self.input_scaler.apply(X))
        return self.output_scaler.invert(out)


def train_mlp(train: TabularDataset, hp: dict, seed: int) -> MLPModel:
    """Fit all targets jointly; deterministic under the seed.

    Raises :class:`TrainingDivergedError` when the loss or any parameter
    becomes non-finite.
    """
    hp = validate_mlp_hp(hp)
    n = train.n_rows
    if n < 2:
        raise ValueError("mlp training needs at least 2 rows")
    input_scaler = fit_scaler(train.features, "standard")
    output_scaler = fit_scaler(train.targets, "standard")
    X = input_scaler.apply(train.features)
    Y = output_scaler.apply(train.targets)

    layer_sizes = (train.n_features, *hp["hidden_sizes"], train.n_targets)
    rng = np.random.default_rng(seed)
    weights, biases = init_parameters(layer_sizes, hp["activation"], rng)

    batch = hp["batch_size"]
    if batch == 0:
        batch = n if n < 1024 else 256
    batch = min(batch, n)
    lr = hp["learning_rate"]
    wd = hp["weight_decay"]

    for _ in range(hp["epochs"]):
        if batch >= n:
            batches = [slice(None)]
        else:
            perm = rng.permutation(n)
            batches = [perm[s : s + batch] for s in range(0, n, batch)]
        for sel in batches:
            loss, gW, gb = loss_and_gradients(
                weights, biases, hp["activation"], X[sel], Y[sel], wd
            )
            if not np.isfinite(loss):
                raise TrainingDivergedError(f"mlp loss became non-finite ({loss})")
            for i in range(len(weights)):
                weights[i] = weights[i] - lr * gW[i]
                biases[i] = biases[i] - lr * gb[i]
    if any(not np.isfinite(W).all() for W in weights) or any(
        not np.isfinite(b).all() for b in biases
    ):
        raise TrainingDivergedError("mlp parameters became non-finite")
    return MLPModel(layer_sizes, weights, biases, hp["activation"], input_scaler, output_scaler)
