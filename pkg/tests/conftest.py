"""Shared independent oracles used to cross-check the implementations.

These stay deliberately naive (pure-python loops, Monte Carlo) so they are
independent of the code paths they verify.
"""

import numpy as np
import pytest


def brute_force_ranks(F: np.ndarray) -> np.ndarray:
    """Dominance peeling by direct O(n^2 m) comparisons (minimize)."""
    n, m = F.shape

    def dominates(a, b):
        not_worse = all(a[k] <= b[k] for k in range(m))
        better = any(a[k] < b[k] for k in range(m))
        return not_worse and better

    ranks = np.full(n, -1, dtype=int)
    remaining = set(range(n))
    rank = 0
    while remaining:
        front = []
        for p in remaining:
            if not any(dominates(F[q], F[p]) for q in remaining if q != p):
                front.append(p)
        for p in front:
            ranks[p] = rank
        remaining -= set(front)
        rank += 1
    return ranks


def mc_hypervolume(front: np.ndarray, ref: np.ndarray, n_samples: int, seed: int):
    """Monte-Carlo hypervolume estimate and its standard error (minimize)."""
    front = np.atleast_2d(front)
    ref = np.asarray(ref, dtype=float)
    front = front[(front < ref).all(axis=1)]
    if front.shape[0] == 0:
        return 0.0, 0.0
    lo = front.min(axis=0)
    box = np.prod(ref - lo)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, ref, size=(n_samples, ref.shape[0]))
    dominated = np.zeros(n_samples, dtype=bool)
    for p in front:
        dominated |= (pts >= p).all(axis=1)
    frac = dominated.mean()
    est = box * frac
    se = box * np.sqrt(max(frac * (1 - frac), 1e-12) / n_samples)
    return float(est), float(se)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
