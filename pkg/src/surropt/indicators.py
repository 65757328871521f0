"""Quantitative Pareto-front comparison: normalization, GD, GD+, exact
hypervolume (2 and 3 objectives), and the simulation rate.

All indicator math runs in minimize orientation on values normalized against
a reference database; the hypervolume reference point sits slightly beyond
the normalized database maxima (1.1 per objective by default) so boundary
database points still contribute volume.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedDimensionError
from .moo import orientation_sign, pareto_filter

DEFAULT_REFERENCE_MARGIN = 0.1


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-objective min/max from the reference database (minimize
    orientation) plus the hypervolume reference point in normalized space."""

    mins: np.ndarray
    maxs: np.ndarray
    reference_point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mins", np.asarray(self.mins, dtype=np.float64))
        object.__setattr__(self, "maxs", np.asarray(self.maxs, dtype=np.float64))
        object.__setattr__(
            self, "reference_point", np.asarray(self.reference_point, dtype=np.float64)
        )
        if (self.mins >= self.maxs).any():
            raise ValueError("degenerate normalization range: min must be < max per objective")

    @classmethod
    def from_database(cls, points: np.ndarray, ref_margin: float = DEFAULT_REFERENCE_MARGIN):
        P = np.atleast_2d(np.asarray(points, dtype=np.float64))
        mins = P.min(axis=0)
        maxs = P.max(axis=0)
        ref = np.full(P.shape[1], 1.0 + ref_margin)
        return cls(mins, maxs, ref)


def normalize(points: np.ndarray, spec: NormalizationSpec) -> np.ndarray:
    """(v - min) / (max - min) per objective; database points land in [0,1]^m,
    outside candidates may exceed it."""
    P = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return (P - spec.mins) / (spec.maxs - spec.mins)


def gd(front: np.ndarray, reference: np.ndarray) -> float:
    """Mean Euclidean distance from each front point to its nearest reference
    point."""
    A = np.atleast_2d(np.asarray(front, dtype=np.float64))
    Z = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if A.size == 0 or Z.size == 0:
        raise ValueError("gd needs non-empty fronts")
    if A.shape[1] != Z.shape[1]:
        raise ValueError("objective-count mismatch")
    dists = np.sqrt(((A[:, None, :] - Z[None, :, :]) ** 2).sum(axis=2))
    return float(dists.min(axis=1).mean())


def gd_plus(front: np.ndarray, reference: np.ndarray) -> float:
    """Like gd but distances only count the dominance-relevant excess
    max(a_j - z_j, 0) per objective (minimize orientation)."""
    A = np.atleast_2d(np.asarray(front, dtype=np.float64))
    Z = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if A.size == 0 or Z.size == 0:
        raise ValueError("gd_plus needs non-empty fronts")
    if A.shape[1] != Z.shape[1]:
        raise ValueError("objective-count mismatch")
    diff = np.maximum(A[:, None, :] - Z[None, :, :], 0.0)
    dists = np.sqrt((diff**2).sum(axis=2))
    return float(dists.min(axis=1).mean())


def _hv2d(P: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((P[:, 1], P[:, 0]))
    hv = 0.0
    best_y = ref[1]
    for i in order:
        x, y = P[i, 0], P[i, 1]
        if y < best_y:
            hv += (ref[0] - x) * (best_y - y)
            best_y = y
    return hv


def _hv3d(P: np.ndarray, ref: np.ndarray) -> float:
    order = np.argsort(P[:, 2], kind="stable")
    P = P[order]
    n = P.shape[0]
    hv = 0.0
    for k in range(n):
        z = P[k, 2]
        z_next = P[k + 1, 2] if k + 1 < n else ref[2]
        if z_next > z:
            hv += _hv2d(P[: k + 1, :2], ref[:2]) * (z_next - z)
    return hv


def hypervolume(front: np.ndarray, reference_point: np.ndarray) -> float:
    """Lebesgue measure of the region dominated by the front and bounded by
    the reference point (minimize orientation). Exact for 2 and 3 objectives;
    points not strictly dominating the reference contribute nothing."""
    P = np.atleast_2d(np.asarray(front, dtype=np.float64))
    ref = np.asarray(reference_point, dtype=np.float64)
    m = P.shape[1]
    if m != ref.shape[0]:
        raise ValueError("reference point dimension mismatch")
    if m not in (2, 3):
        raise UnsupportedDimensionError(f"exact hypervolume supports m in {{2, 3}}, got {m}")
    P = P[(P < ref).all(axis=1)]
    if P.shape[0] == 0:
        return 0.0
    return float(_hv2d(P, ref) if m == 2 else _hv3d(P, ref))


def simulation_rate(candidates: int, validated_ok: int) -> float:
    """Fraction of proposed candidates whose ground-truth evaluation
    succeeded."""
    if candidates < 1:
        raise ValueError("need at least one candidate")
    if not (0 <= validated_ok <= candidates):
        raise ValueError("validated_ok must lie in [0, candidates]")
    return validated_ok / candidates


@dataclass(frozen=True)
class RunFront:
    """A validated front to score: objective points in user orientation."""

    label: str
    points: np.ndarray
    simulation_rate: Optional[float] = None


@dataclass(frozen=True)
class IndicatorRow:
    label: str
    simulation_rate: Optional[float]
    gd: Optional[float]
    gd_plus: Optional[float]
    hv: float


DATABASE_LABEL = "database"


def compare_runs(
    runs: list[RunFront],
    database_targets: np.ndarray,
    directions,
    ref_margin: float = DEFAULT_REFERENCE_MARGIN,
) -> list[IndicatorRow]:
    """Score each run against the database baseline.

    Normalization spans come from the database. GD/GD+ measure each run's
    validated front against the database-only front; HV is computed on the
    union of database and run points ("DB + model"), so it can only meet or
    exceed the database row.
    """
    if not runs:
        raise ValueError("need at least one run")
    sign = orientation_sign(directions)
    db = np.atleast_2d(np.asarray(database_targets, dtype=np.float64)) * sign
    m = db.shape[1]
    spec = NormalizationSpec.from_database(db, ref_margin)
    dbn = normalize(db, spec)
    db_front = dbn[pareto_filter(dbn)]
    rows = [
        IndicatorRow(
            DATABASE_LABEL, None, None, None, hypervolume(db_front, spec.reference_point)
        )
    ]
    for run in runs:
        P = np.atleast_2d(np.asarray(run.points, dtype=np.float64)) * sign
        if P.shape[1] != m:
            raise ValueError(
                f"run {run.label!r} has {P.shape[1]} objectives, database has {m}"
            )
        Pn = normalize(P, spec)
        run_front = Pn[pareto_filter(Pn)]
        merged = np.vstack([dbn, Pn])
        rows.append(
            IndicatorRow(
                run.label,
                run.simulation_rate,
                gd(run_front, db_front),
                gd_plus(run_front, db_front),
                hypervolume(merged, spec.reference_point),
            )
        )
    return rows


def write_indicators_csv(rows: list[IndicatorRow], path) -> None:
    def fmt(v):
        return "" if v is None else repr(float(v))

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "simulation_rate", "gd", "gd_plus", "hv"])
        for row in rows:
            writer.writerow(
                [row.label, fmt(row.simulation_rate), fmt(row.gd), fmt(row.gd_plus), fmt(row.hv)]
            )
