"""Weighted-average ensemble with weights learned on a holdout set.

Weights live on the probability simplex and are fit by projected gradient
descent on holdout MSE. The search starts from the best single member and
keeps the best iterate, so the ensemble never does worse than its best
member on the holdout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import TabularDataset


def simplex_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w : w >= 0, sum w = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u * k > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


@dataclass
class EnsembleModel:
    members: tuple
    weights: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = self.weights[0] * self.members[0].predict(X)
        for w, member in zip(self.weights[1:], self.members[1:]):
            out = out + w * member.predict(X)
        return out


def train_ensemble(members, holdout: TabularDataset, n_iter: int = 500) -> EnsembleModel:
    """Learn convex combination weights minimizing holdout MSE."""
    members = tuple(members)
    if len(members) < 2:
        raise ValueError("an ensemble needs at least 2 members")
    m = holdout.n_targets
    preds = []
    for member in members:
        P = np.atleast_2d(member.predict(holdout.features))
        if P.shape != (holdout.n_rows, m):
            raise ValueError(
                f"member predicts {P.shape[1] if P.ndim == 2 else 1} targets, expected {m}"
            )
        preds.append(P.reshape(-1))
    A = np.stack(preds)  # (k, q*m)
    y = holdout.targets.reshape(-1)
    k, qm = A.shape

    G = (A @ A.T) / qm
    b = (A @ y) / qm
    const = float(y @ y) / qm

    def objective(w):
        return float(w @ G @ w - 2.0 * w @ b + const)

    member_mse = np.array([objective(np.eye(k)[i]) for i in range(k)])
    best_i = int(np.argmin(member_mse))
    w = np.eye(k)[best_i]
    best_w = w.copy()
    best_j = member_mse[best_i]

    lam = float(np.linalg.eigvalsh(G)[-1])
    if lam > 0.0:
        step = 0.5 / lam
        for _ in range(n_iter):
            grad = 2.0 * (G @ w - b)
            w = simplex_project(w - step * grad)
            j = objective(w)
            if j < best_j:
                best_j = j
                best_w = w.copy()
    return EnsembleModel(members, best_w)
