"""Regression metrics on a held-out dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import TabularDataset
from ..errors import UndefinedMAPEError

# MAPE is undefined at y = 0; targets below this magnitude are excluded and
# counted instead.
ZERO_TARGET_THRESHOLD = 1e-8


@dataclass
class RegressionMetrics:
    target_name: str
    mape: float
    mse: float
    residuals: np.ndarray
    excluded_zero_targets: int


def mape_and_exclusions(y: np.ndarray, y_hat: np.ndarray) -> tuple[float, int]:
    mask = np.abs(y) >= ZERO_TARGET_THRESHOLD
    excluded = int((~mask).sum())
    if not mask.any():
        raise UndefinedMAPEError("every target value is below the zero-exclusion threshold")
    mape = 100.0 * float((np.abs(y[mask] - y_hat[mask]) / np.abs(y[mask])).mean())
    return mape, excluded


def evaluate(model, test: TabularDataset) -> list[RegressionMetrics]:
    """Per-target MAPE, MSE, and residuals of a model on a test set.

    MAPE skips rows whose target magnitude is below the exclusion threshold;
    MSE covers all rows; residuals are kept for the non-excluded rows.
    """
    if test.n_rows < 1:
        raise ValueError("test set is empty")
    pred = model.predict(test.features)
    out = []
    for j, name in enumerate(test.target_names):
        y = test.targets[:, j]
        y_hat = pred[:, j]
        mask = np.abs(y) >= ZERO_TARGET_THRESHOLD
        excluded = int((~mask).sum())
        if not mask.any():
            raise UndefinedMAPEError(
                f"target {name!r}: every value is below the zero-exclusion threshold"
            )
        mape = 100.0 * float((np.abs(y[mask] - y_hat[mask]) / np.abs(y[mask])).mean())
        mse = float(((y - y_hat) ** 2).mean())
        out.append(RegressionMetrics(name, mape, mse, (y - y_hat)[mask], excluded))
    return out
