"""Analytic ground-truth problems standing in for expensive simulators.

Each problem evaluates a batch of design vectors to objective values, can
flag designs as infeasible (emulating failed simulations), and — where the
analytic Pareto front is known — produces reference front points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._seeding import TAG_SAMPLE, seed_for
from .dataset import FeatureBounds, TabularDataset, latin_hypercube, uniform_random
from .errors import EmptyDatasetError

OUT_OF_BOUNDS = "out_of_bounds"
CONSTRAINT_VIOLATED = "constraint_violated"


@dataclass(frozen=True)
class EvaluationOutcome:
    """Either m finite objective values or an infeasibility marker."""

    objectives: Optional[np.ndarray]
    reason: Optional[str] = None

    def __post_init__(self):
        if (self.objectives is None) == (self.reason is None):
            raise ValueError("exactly one of objectives/reason must be set")

    @property
    def ok(self) -> bool:
        return self.objectives is not None


@dataclass(frozen=True)
class OracleProblem:
    """Deterministic multiobjective test problem with box bounds."""

    name: str
    n_vars: int
    n_objectives: int
    bounds: FeatureBounds
    directions: tuple[str, ...]
    objective_names: tuple[str, ...]
    objectives_fn: Callable[[np.ndarray], np.ndarray]
    constraint_ok: Optional[Callable[[np.ndarray], np.ndarray]] = None
    true_front_available: bool = False
    true_front_fn: Optional[Callable[[int], np.ndarray]] = None

    def evaluate_matrix(self, X: np.ndarray) -> tuple[np.ndarray, list[Optional[str]]]:
        """Batch evaluation: (q, m) objective matrix with NaN rows for
        infeasible designs, plus the per-row infeasibility reason."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_vars:
            raise ValueError(f"{self.name}: expected {self.n_vars} columns, got {X.shape[1]}")
        q = X.shape[0]
        F = np.full((q, self.n_objectives), np.nan)
        reasons: list[Optional[str]] = [None] * q
        in_bounds = self.bounds.contains(X)
        feasible = in_bounds.copy()
        for i in np.nonzero(~in_bounds)[0]:
            reasons[i] = OUT_OF_BOUNDS
        if self.constraint_ok is not None and feasible.any():
            ok = self.constraint_ok(X[feasible])
            idx = np.nonzero(feasible)[0]
            for i in idx[~ok]:
                reasons[i] = CONSTRAINT_VIOLATED
            feasible[idx[~ok]] = False
        if feasible.any():
            F[feasible] = self.objectives_fn(X[feasible])
        return F, reasons


def evaluate_batch(problem: OracleProblem, X: np.ndarray) -> list[EvaluationOutcome]:
    """Elementwise evaluation of a design matrix into outcome records."""
    F, reasons = problem.evaluate_matrix(X)
    out = []
    for i in range(F.shape[0]):
        if reasons[i] is None:
            out.append(EvaluationOutcome(objectives=F[i].copy()))
        else:
            out.append(EvaluationOutcome(objectives=None, reason=reasons[i]))
    return out


def true_front(problem: OracleProblem, n: int) -> np.ndarray:
    """n points on the problem's analytic Pareto front."""
    if not problem.true_front_available or problem.true_front_fn is None:
        raise ValueError(f"{problem.name}: analytic front not available")
    if n < 1:
        raise ValueError("need n >= 1 front points")
    return problem.true_front_fn(n)


def generate_dataset(
    problem: OracleProblem, sampler: str, n: int, seed: int
) -> tuple[TabularDataset, int]:
    """Sample the design box, evaluate, and drop infeasible rows (counted)."""
    if n < 2:
        raise ValueError("need n >= 2 samples")
    if sampler == "lhd":
        X = latin_hypercube(n, problem.bounds, seed_for(seed, TAG_SAMPLE))
    elif sampler == "uniform":
        X = uniform_random(n, problem.bounds, seed_for(seed, TAG_SAMPLE))
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    F, _ = problem.evaluate_matrix(X)
    ok = np.isfinite(F).all(axis=1)
    dropped = int((~ok).sum())
    if not ok.any():
        raise EmptyDatasetError(f"{problem.name}: every sampled design was infeasible")
    feature_names = tuple(f"x{j}" for j in range(problem.n_vars))
    ds = TabularDataset(feature_names, problem.objective_names, X[ok], F[ok])
    return ds, dropped


# ---------------------------------------------------------------------------
# Problem definitions
# ---------------------------------------------------------------------------


def _zdt_g(X: np.ndarray) -> np.ndarray:
    return 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (X.shape[1] - 1)


def _zdt1_f(X: np.ndarray) -> np.ndarray:
    f1 = X[:, 0]
    g = _zdt_g(X)
    f2 = g * (1.0 - np.sqrt(f1 / g))
    return np.column_stack([f1, f2])


def _zdt2_f(X: np.ndarray) -> np.ndarray:
    f1 = X[:, 0]
    g = _zdt_g(X)
    f2 = g * (1.0 - (f1 / g) ** 2)
    return np.column_stack([f1, f2])


def _zdt3_f(X: np.ndarray) -> np.ndarray:
    f1 = X[:, 0]
    g = _zdt_g(X)
    h = 1.0 - np.sqrt(f1 / g) - (f1 / g) * np.sin(10.0 * np.pi * f1)
    return np.column_stack([f1, g * h])


def _zdt1_front(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.0])
    return np.column_stack([t, 1.0 - np.sqrt(t)])


def _zdt2_front(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n) if n > 1 else np.array([0.0])
    return np.column_stack([t, 1.0 - t**2])


def _zdt3_front(n: int) -> np.ndarray:
    # The optimal region of f1 is disconnected; derive it by densely sampling
    # the g=1 curve and keeping the non-dominated points.
    t = np.linspace(0.0, 1.0, max(5000, 50 * n))
    f2 = 1.0 - np.sqrt(t) - t * np.sin(10.0 * np.pi * t)
    pts = np.column_stack([t, f2])
    keep = np.ones(len(pts), dtype=bool)
    order = np.argsort(pts[:, 0], kind="stable")
    best_f2 = np.inf
    for i in order:
        if pts[i, 1] < best_f2:
            best_f2 = pts[i, 1]
        else:
            keep[i] = False
    front = pts[keep]
    idx = np.linspace(0, len(front) - 1, n).round().astype(int)
    return front[idx]


def _dtlz2_f(X: np.ndarray) -> np.ndarray:
    g = ((X[:, 2:] - 0.5) ** 2).sum(axis=1)
    t1 = X[:, 0] * np.pi / 2.0
    t2 = X[:, 1] * np.pi / 2.0
    f1 = (1.0 + g) * np.cos(t1) * np.cos(t2)
    f2 = (1.0 + g) * np.cos(t1) * np.sin(t2)
    f3 = (1.0 + g) * np.sin(t1)
    return np.column_stack([f1, f2, f3])


def _dtlz2_front(n: int) -> np.ndarray:
    # Deterministic covering of the unit-sphere octant via a 2-D grid in the
    # angular parameters.
    k = int(np.ceil(np.sqrt(n)))
    u, v = np.meshgrid(np.linspace(0.0, 1.0, k), np.linspace(0.0, 1.0, k))
    u = u.ravel()[:n] * np.pi / 2.0
    v = v.ravel()[:n] * np.pi / 2.0
    return np.column_stack([np.cos(u) * np.cos(v), np.cos(u) * np.sin(v), np.sin(u)])


def _unit_box(d: int) -> FeatureBounds:
    return FeatureBounds(np.zeros(d), np.ones(d))


def _disk_ok(X: np.ndarray) -> np.ndarray:
    # Excluded ball of squared radius 0.04 around the box center.
    return ((X - 0.5) ** 2).sum(axis=1) >= 0.04


def _make_zdt(name, d, fn, front_fn, constraint=None):
    return OracleProblem(
        name=name,
        n_vars=d,
        n_objectives=2,
        bounds=_unit_box(d),
        directions=("minimize", "minimize"),
        objective_names=("f1", "f2"),
        objectives_fn=fn,
        constraint_ok=constraint,
        true_front_available=front_fn is not None,
        true_front_fn=front_fn,
    )


# zdt1-disk uses d=3 so the excluded center ball swallows a few percent of
# uniform samples (about 3.4%); at d=30 the ball would never be hit.
PROBLEMS: dict[str, OracleProblem] = {
    "zdt1": _make_zdt("zdt1", 30, _zdt1_f, _zdt1_front),
    "zdt2": _make_zdt("zdt2", 30, _zdt2_f, _zdt2_front),
    "zdt3": _make_zdt("zdt3", 30, _zdt3_f, _zdt3_front),
    "zdt1-disk": _make_zdt("zdt1-disk", 3, _zdt1_f, _zdt1_front, constraint=_disk_ok),
    "dtlz2": OracleProblem(
        name="dtlz2",
        n_vars=12,
        n_objectives=3,
        bounds=_unit_box(12),
        directions=("minimize", "minimize", "minimize"),
        objective_names=("f1", "f2", "f3"),
        objectives_fn=_dtlz2_f,
        true_front_available=True,
        true_front_fn=_dtlz2_front,
    ),
}


def get_problem(name: str) -> OracleProblem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown oracle problem {name!r}; known: {sorted(PROBLEMS)}") from None
