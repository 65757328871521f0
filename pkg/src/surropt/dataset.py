"""Tabular dataset ingestion, cleaning, splitting, scaling, and sampling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, EmptyDatasetError


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TabularDataset:
    """An n×d feature matrix paired with an n×m target matrix.

    Immutable after construction; the backing arrays are marked read-only so
    instances can be shared across threads.
    """

    feature_names: tuple[str, ...]
    target_names: tuple[str, ...]
    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "target_names", tuple(self.target_names))
        object.__setattr__(self, "features", _readonly(self.features))
        object.__setattr__(self, "targets", _readonly(self.targets))
        if self.features.ndim != 2 or self.targets.ndim != 2:
            raise DatasetFormatError("features and targets must be 2-D matrices")
        n, d = self.features.shape
        n2, m = self.targets.shape
        if n < 1 or d < 1 or m < 1:
            raise DatasetFormatError("need at least one row, one feature, one target")
        if n != n2:
            raise DatasetFormatError(f"row mismatch: {n} feature rows vs {n2} target rows")
        if d != len(self.feature_names) or m != len(self.target_names):
            raise DatasetFormatError("column names do not match matrix shapes")
        names = self.feature_names + self.target_names
        if len(set(names)) != len(names):
            raise DatasetFormatError("feature/target names must be unique and disjoint")
        if not np.isfinite(self.features).all() or not np.isfinite(self.targets).all():
            raise DatasetFormatError("dataset contains non-finite values")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_targets(self) -> int:
        return self.targets.shape[1]

    def rows(self, index) -> "TabularDataset":
        """Dataset restricted to the given row indices (in the given order)."""
        return TabularDataset(
            self.feature_names, self.target_names, self.features[index], self.targets[index]
        )

    def select_targets(self, indices) -> "TabularDataset":
        """Dataset keeping only the chosen target columns."""
        idx = list(indices)
        return TabularDataset(
            self.feature_names,
            tuple(self.target_names[i] for i in idx),
            self.features,
            self.targets[:, idx],
        )

    def feature_bounds(self) -> "FeatureBounds":
        """Observed per-feature min/max box."""
        return FeatureBounds(self.features.min(axis=0), self.features.max(axis=0))


@dataclass(frozen=True)
class FeatureBounds:
    """Box domain: per-dimension lower and upper limits."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", _readonly(np.atleast_1d(self.lower)))
        object.__setattr__(self, "upper", _readonly(np.atleast_1d(self.upper)))
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("lower/upper must be 1-D vectors of equal length")
        if (self.lower > self.upper).any():
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, X: np.ndarray) -> np.ndarray:
        """Row mask: True where every coordinate lies inside the box."""
        X = np.atleast_2d(X)
        return ((X >= self.lower) & (X <= self.upper)).all(axis=1)


@dataclass(frozen=True)
class Scaler:
    """Per-column affine transform ``(x - shift) / scale`` with exact inverse."""

    shift: np.ndarray
    scale: np.ndarray
    kind: str

    def __post_init__(self):
        object.__setattr__(self, "shift", _readonly(np.atleast_1d(self.shift)))
        object.__setattr__(self, "scale", _readonly(np.atleast_1d(self.scale)))
        if self.kind not in ("standard", "minmax"):
            raise ValueError(f"unknown scaler kind {self.kind!r}")
        if (self.scale <= 0).any():
            raise ValueError("scale entries must be positive")

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.shift) / self.scale

    def invert(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) * self.scale + self.shift


def fit_scaler(data, kind: str = "standard") -> Scaler:
    """Fit a per-column scaler on a matrix (or on a dataset's features).

    Standard scaling uses the sample standard deviation (ddof=1). Columns with
    zero spread get scale 1 so the transform stays invertible.
    """
    X = data.features if isinstance(data, TabularDataset) else np.asarray(data, dtype=np.float64)
    X = np.atleast_2d(X)
    if X.shape[0] < 2:
        raise ValueError("scaler fitting needs at least 2 rows")
    if kind == "standard":
        shift = X.mean(axis=0)
        scale = X.std(axis=0, ddof=1)
    elif kind == "minmax":
        shift = X.min(axis=0)
        scale = X.max(axis=0) - shift
    else:
        raise ValueError(f"unknown scaler kind {kind!r}")
    scale = np.where(scale > 0.0, scale, 1.0)
    return Scaler(shift, scale, kind)


def apply_scaler(scaler: Scaler, X: np.ndarray) -> np.ndarray:
    return scaler.apply(X)


def invert_scaler(scaler: Scaler, X: np.ndarray) -> np.ndarray:
    return scaler.invert(X)


def load_csv(path, n_feature_columns: int) -> tuple[TabularDataset, int]:
    """Load a comma-separated dataset, dropping incomplete rows.

    The first ``n_feature_columns`` columns are features, the rest targets;
    the header row supplies the names. A row is incomplete when any cell is
    empty, unparseable, or non-finite; such rows are dropped silently and
    counted. Returns the cleaned dataset and the drop count.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    if n_feature_columns < 1:
        raise DatasetFormatError("n_feature_columns must be >= 1")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError(f"{path}: empty file, no header row") from None
        header = [h.strip() for h in header]
        if len(header) < n_feature_columns + 1:
            raise DatasetFormatError(
                f"{path}: header has {len(header)} columns, "
                f"need at least {n_feature_columns + 1}"
            )
        width = len(header)
        kept: list[list[float]] = []
        dropped = 0
        for row in reader:
            if not row:
                continue
            if len(row) != width:
                dropped += 1
                continue
            values = []
            ok = True
            for cell in row:
                cell = cell.strip()
                if not cell:
                    ok = False
                    break
                try:
                    v = float(cell)
                except ValueError:
                    ok = False
                    break
                if not math.isfinite(v):
                    ok = False
                    break
                values.append(v)
            if ok:
                kept.append(values)
            else:
                dropped += 1
    if not kept:
        raise EmptyDatasetError(f"{path}: no rows survived the completeness filter")
    data = np.asarray(kept, dtype=np.float64)
    ds = TabularDataset(
        tuple(header[:n_feature_columns]),
        tuple(header[n_feature_columns:]),
        data[:, :n_feature_columns],
        data[:, n_feature_columns:],
    )
    return ds, dropped


def write_csv(ds: TabularDataset, path) -> None:
    """Write a dataset in the toolkit's CSV exchange format (feature columns
    first, then target columns; shortest-roundtrip float formatting)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + list(ds.target_names))
        for i in range(ds.n_rows):
            row = [repr(float(v)) for v in ds.features[i]]
            row += [repr(float(v)) for v in ds.targets[i]]
            writer.writerow(row)


def split(ds: TabularDataset, test_fraction: float, seed: int) -> tuple[TabularDataset, TabularDataset]:
    """Deterministic shuffled train/test partition.

    The train share is ``floor(n * (1 - test_fraction))`` rows and the test
    share the remainder, so a 691-row dataset at 0.2 splits 552/139 and a
    1000-row dataset splits 800/200.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    n = ds.n_rows
    n_train = int(math.floor(n * (1.0 - test_fraction)))
    n_test = n - n_train
    if n_train < 1 or n_test < 1:
        raise ValueError(f"dataset with {n} rows is too small for fraction {test_fraction}")
    perm = np.random.default_rng(seed).permutation(n)
    return ds.rows(perm[:n_train]), ds.rows(perm[n_train:])


def latin_hypercube(n: int, bounds: FeatureBounds, seed: int) -> np.ndarray:
    """Latin hypercube design: one sample per stratum in every 1-D projection.

    Each dimension gets an independent random permutation of the n strata and
    a uniform position within each stratum.
    """
    if n < 1:
        raise ValueError("need n >= 1 samples")
    rng = np.random.default_rng(seed)
    d = bounds.dim
    u = np.empty((n, d))
    for j in range(d):
        strata = rng.permutation(n)
        u[:, j] = (strata + rng.uniform(size=n)) / n
    return bounds.lower + u * bounds.span


def uniform_random(n: int, bounds: FeatureBounds, seed: int) -> np.ndarray:
    """I.i.d. uniform samples inside the box, deterministic under the seed."""
    if n < 1:
        raise ValueError("need n >= 1 samples")
    rng = np.random.default_rng(seed)
    return bounds.lower + rng.uniform(size=(n, bounds.dim)) * bounds.span
