"""NSGA-II over an arbitrary batch evaluator, plus Pareto-set utilities.

Objectives are handled internally in minimize orientation (maximize columns
are negated on the way in and restored on the way out). Designs whose
evaluation comes back non-finite are kept alive but demoted below every
ranked individual, so a surrogate emitting garbage in some region cannot
crash a run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._seeding import TAG_MOO_GEN, TAG_MOO_INIT, rng_for, seed_for
from .dataset import FeatureBounds, latin_hypercube
from .kernels import nds_ranks
from .oracle import OracleProblem

MINIMIZE = "minimize"
MAXIMIZE = "maximize"


def orientation_sign(directions) -> np.ndarray:
    sign = np.empty(len(directions))
    for i, d in enumerate(directions):
        if d == MINIMIZE:
            sign[i] = 1.0
        elif d == MAXIMIZE:
            sign[i] = -1.0
        else:
            raise ValueError(f"direction must be {MINIMIZE!r} or {MAXIMIZE!r}, got {d!r}")
    return sign


@dataclass(frozen=True)
class ProblemSpec:
    """What the optimizer needs: a box, objective metadata, and a batch
    evaluator mapping a (q, d) matrix to a (q, m) objective matrix (rows with
    non-finite entries mark failed designs)."""

    bounds: FeatureBounds
    objective_names: tuple[str, ...]
    directions: tuple[str, ...]
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "objective_names", tuple(self.objective_names))
        object.__setattr__(self, "directions", tuple(self.directions))
        if len(self.objective_names) < 2:
            raise ValueError("multiobjective problems need at least 2 objectives")
        if len(self.directions) != len(self.objective_names):
            raise ValueError("directions and objective_names lengths differ")
        orientation_sign(self.directions)  # validates entries

    @property
    def n_objectives(self) -> int:
        return len(self.objective_names)


def problem_from_oracle(problem: OracleProblem) -> ProblemSpec:
    def evaluator(X):
        F, _ = problem.evaluate_matrix(X)
        return F

    return ProblemSpec(problem.bounds, problem.objective_names, problem.directions, evaluator)


def problem_from_surrogate(model, bounds, objective_names, directions) -> ProblemSpec:
    return ProblemSpec(bounds, tuple(objective_names), tuple(directions), model.predict)


@dataclass
class Individual:
    x: np.ndarray
    objectives: np.ndarray  # user orientation; NaN row when evaluation failed
    rank: int
    crowding: float


@dataclass
class NSGA2Result:
    population: list[Individual]
    front: list[Individual]
    n_evaluations: int
    n_nonfinite: int

    @property
    def front_x(self) -> np.ndarray:
        return np.array([ind.x for ind in self.front])

    @property
    def front_objectives(self) -> np.ndarray:
        return np.array([ind.objectives for ind in self.front])


# ---------------------------------------------------------------------------
# Ranking and diversity
# ---------------------------------------------------------------------------


def dominance_ranks(F: np.ndarray) -> np.ndarray:
    """Non-domination rank per point (0 = non-dominated), minimize orientation."""
    F = np.ascontiguousarray(np.atleast_2d(F), dtype=np.float64)
    if not np.isfinite(F).all():
        raise ValueError("objectives must be finite for ranking")
    return nds_ranks(F)

def fast_non_dominated_sort(F: np.ndarray) -> list[np.ndarray]:
    """Fronts as index arrays: front k+1 is non-dominated after removing
    fronts 0..k."""
    ranks = dominance_ranks(F)
    return [np.nonzero(ranks == r)[0] for r in range(int(ranks.max()) + 1)]


def crowding_distance(F: np.ndarray) -> np.ndarray:
    """Per-objective normalized neighbor-gap sum; boundary points get +inf,
    zero-range objectives contribute nothing."""
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    k, m = F.shape
    if k == 0:
        raise ValueError("empty front")
    if k <= 2:
        return np.full(k, np.inf)
    dist = np.zeros(k)
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        fj = F[order, j]
        span = fj[-1] - fj[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (fj[2:] - fj[:-2]) / span
    return dist


def pareto_filter(points: np.ndarray, directions=None) -> np.ndarray:
    """Indices (ascending) of the non-dominated points. Weakly-dominating
    duplicates are all retained."""
    P = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if directions is not None:
        P = P * orientation_sign(directions)
    ranks = dominance_ranks(P)
    return np.nonzero(ranks == 0)[0]


# ---------------------------------------------------------------------------
# Variation operators
# ---------------------------------------------------------------------------


def sbx_crossover(p1, p2, eta_c: float, bounds: FeatureBounds, rng) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover; children are clipped to the box.

    As in the reference formulation, the two child values of each gene are
    exchanged with probability 1/2, so each child inherits a random mix of
    near-p1 and near-p2 genes rather than shadowing one parent.
    """
    u = rng.uniform(size=p1.shape[0])
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta_c + 1.0)),
        (0.5 / (1.0 - u)) ** (1.0 / (eta_c + 1.0)),
    )
    a = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    b = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    swap = rng.uniform(size=p1.shape[0]) < 0.5
    c1 = np.where(swap, b, a)
    c2 = np.where(swap, a, b)
    return (
        np.clip(c1, bounds.lower, bounds.upper),
        np.clip(c2, bounds.lower, bounds.upper),
    )


def polynomial_mutation(x, eta_m: float, rate: float, bounds: FeatureBounds, rng) -> np.ndarray:
    """Polynomial mutation applied per gene with the given probability."""
    d = x.shape[0]
    apply_mask = rng.uniform(size=d) < rate
    u = rng.uniform(size=d)
    delta = np.where(
        u < 0.5,
        (2.0 * u) ** (1.0 / (eta_m + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta_m + 1.0)),
    )
    out = np.where(apply_mask, x + delta * bounds.span, x)
    return np.clip(out, bounds.lower, bounds.upper)


# ---------------------------------------------------------------------------
# The optimizer
# ---------------------------------------------------------------------------


def _evaluate(problem: ProblemSpec, X: np.ndarray) -> tuple[np.ndarray, int]:
    F = np.atleast_2d(np.asarray(problem.evaluator(X), dtype=np.float64))
    if F.shape != (X.shape[0], problem.n_objectives):
        raise ValueError(f"evaluator returned shape {F.shape}, expected "
                         f"{(X.shape[0], problem.n_objectives)}")
    bad = ~np.isfinite(F).all(axis=1)
    if bad.any():
        F = F.copy()
        F[bad] = np.nan
    return F, int(bad.sum())


def _rank_and_crowd(F_int: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ranks and crowding with failed evaluations demoted below every front."""
    n = F_int.shape[0]
    valid = np.isfinite(F_int).all(axis=1)
    ranks = np.zeros(n, dtype=np.int64)
    crowd = np.zeros(n)
    worst = 0
    if valid.any():
        vidx = np.nonzero(valid)[0]
        vr = nds_ranks(np.ascontiguousarray(F_int[vidx]))
        ranks[vidx] = vr
        worst = int(vr.max()) + 1
        for r in range(worst):
            sel = vidx[vr == r]
            crowd[sel] = crowding_distance(F_int[sel])
    ranks[~valid] = worst
    return ranks, crowd


def _tournament(ranks, crowd, rng) -> int:
    ij = rng.integers(0, len(ranks), size=2)
    i, j = int(ij[0]), int(ij[1])
    if ranks[j] < ranks[i]:
        return j
    if ranks[i] < ranks[j]:
        return i
    if crowd[j] > crowd[i]:
        return j
    return i


def nsga2_run(
    problem: ProblemSpec,
    pop_size: int,
    generations: int,
    *,
    crossover_prob: float = 0.9,
    eta_c: float = 15.0,
    eta_m: float = 20.0,
    mutation_rate: Optional[float] = None,
    seed: int = 0,
) -> NSGA2Result:
    """Classic (mu+lambda) NSGA-II loop, deterministic under the seed.

    The initial population is a Latin hypercube over the box; parents come
    from binary tournaments on (rank, crowding); variation is SBX plus
    polynomial mutation; survivors are picked by rank then crowding. The
    evaluation count is pop_size * (generations + 1).
    """
    if pop_size < 4 or pop_size % 2 != 0:
        raise ValueError("pop_size must be even and >= 4")
    if generations < 0:
        raise ValueError("generations must be >= 0")
    d = problem.bounds.dim
    sign = orientation_sign(problem.directions)
    rate = (1.0 / d) if mutation_rate is None else mutation_rate

    X = latin_hypercube(pop_size, problem.bounds, seed_for(seed, TAG_MOO_INIT))
    F, n_bad = _evaluate(problem, X)
    n_evaluations = pop_size
    n_nonfinite = n_bad
    ranks, crowd = _rank_and_crowd(F * sign)

    for gen in range(1, generations + 1):
        rng = rng_for(seed, TAG_MOO_GEN, gen)
        children = np.empty((pop_size, d))
        for i in range(0, pop_size, 2):
            a = _tournament(ranks, crowd, rng)
            b = _tournament(ranks, crowd, rng)
            if rng.uniform() < crossover_prob:
                c1, c2 = sbx_crossover(X[a], X[b], eta_c, problem.bounds, rng)
            else:
                c1, c2 = X[a].copy(), X[b].copy()
            children[i] = polynomial_mutation(c1, eta_m, rate, problem.bounds, rng)
            children[i + 1] = polynomial_mutation(c2, eta_m, rate, problem.bounds, rng)
        CF, n_bad = _evaluate(problem, children)
        n_evaluations += pop_size
        n_nonfinite += n_bad

        AX = np.vstack([X, children])
        AF = np.vstack([F, CF])
        ranks_all, crowd_all = _rank_and_crowd(AF * sign)
        order = np.lexsort((np.arange(AX.shape[0]), -crowd_all, ranks_all))
        keep = order[:pop_size]
        X, F = AX[keep], AF[keep]
        ranks, crowd = _rank_and_crowd(F * sign)

    population = [
        Individual(X[i].copy(), F[i].copy(), int(ranks[i]), float(crowd[i]))
        for i in range(pop_size)
    ]
    valid = np.isfinite(F).all(axis=1)
    front = [population[i] for i in range(pop_size) if ranks[i] == 0 and valid[i]]
    return NSGA2Result(population, front, n_evaluations, n_nonfinite)
