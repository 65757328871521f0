import os
import subprocess
import sys

import numpy as np
import pytest

from surropt import kernels


def test_selected_path_matches_environment():
    flag = os.environ.get("SURROPT_NO_NUMBA", "0").strip()
    expected = flag in ("", "0")
    assert kernels.USING_NUMBA == expected


def test_env_flag_selects_numpy_path():
    out = subprocess.run(
        [sys.executable, "-c", "from surropt import kernels; print(kernels.USING_NUMBA)"],
        env={**os.environ, "SURROPT_NO_NUMBA": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "False"


needs_numba = pytest.mark.skipif(not kernels.USING_NUMBA, reason="numba path disabled")


@needs_numba
class TestPathParity:
    def test_best_split_bitwise_equal(self, rng):
        for _ in range(30):
            n = int(rng.integers(4, 300))
            d = int(rng.integers(1, 12))
            X = rng.normal(size=(n, d))
            y = rng.normal(size=n)
            ml = int(rng.integers(1, 6))
            assert kernels._gbt_best_split_numpy(X, y, ml) == kernels._gbt_best_split_numba(
                X, y, ml
            )

    def test_nds_ranks_bitwise_equal(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 250))
            m = int(rng.integers(2, 4))
            F = rng.normal(size=(n, m))
            np.testing.assert_array_equal(
                kernels._nds_ranks_numpy(F), kernels._nds_ranks_numba(F)
            )
        # duplicated rows exercise the weak-dominance ties
        F = np.repeat(rng.normal(size=(15, 2)), 2, axis=0)
        np.testing.assert_array_equal(kernels._nds_ranks_numpy(F), kernels._nds_ranks_numba(F))

    def test_forest_predict_bitwise_equal(self, rng):
        from surropt.dataset import TabularDataset
        from surropt.surrogate import train_gbt

        X = rng.uniform(size=(150, 5))
        y = X[:, 0] * 2 - np.cos(4 * X[:, 3])
        ds = TabularDataset(tuple(f"x{i}" for i in range(5)), ("y",), X, y.reshape(-1, 1))
        g = train_gbt(ds, 0, {"n_trees": 40, "max_depth": 4}, 0)
        Q = rng.uniform(size=(70, 5))
        args = (g.feature, g.threshold, g.left, g.right, g.value, g.offsets, Q,
                g.learning_rate, g.base_prediction)
        np.testing.assert_array_equal(
            kernels._forest_predict_numpy(*args), kernels._forest_predict_numba(*args)
        )

    def test_empty_forest_predicts_base(self, rng):
        feature = np.empty(0, dtype=np.int64)
        fl = np.empty(0, dtype=np.float64)
        offsets = np.zeros(1, dtype=np.int64)
        Q = rng.uniform(size=(5, 2))
        for fn in (kernels._forest_predict_numpy, kernels._forest_predict_numba):
            out = fn(feature, fl, feature, feature, fl, offsets, Q, 0.1, 3.5)
            np.testing.assert_array_equal(out, np.full(5, 3.5))
