import numpy as np
import pytest

from surropt.dataset import (
    FeatureBounds,
    TabularDataset,
    apply_scaler,
    fit_scaler,
    invert_scaler,
    latin_hypercube,
    load_csv,
    split,
    uniform_random,
    write_csv,
)
from surropt.errors import DatasetFormatError, EmptyDatasetError


def _write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCsv:
    def test_clean_file_loads_all_rows(self, tmp_path):
        p = _write(tmp_path, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n")
        ds, dropped = load_csv(p, 2)
        assert ds.n_rows == 3 and dropped == 0
        assert ds.feature_names == ("a", "b") and ds.target_names == ("y",)
        np.testing.assert_array_equal(ds.targets[:, 0], [3, 6, 9])

    def test_empty_target_cell_drops_row(self, tmp_path):
        p = _write(tmp_path, "a,b,y\n1,2,3\n4,5,\n7,8,9\n")
        ds, dropped = load_csv(p, 2)
        assert ds.n_rows == 2 and dropped == 1

    def test_nan_token_dropped_and_all_values_finite(self, tmp_path):
        p = _write(tmp_path, "a,b,y\n1,NaN,3\n4,5,6\ninf,8,9\nx,1,2\n1,1,1\n")
        ds, dropped = load_csv(p, 2)
        assert dropped == 3
        assert np.isfinite(ds.features).all() and np.isfinite(ds.targets).all()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv", 2)

    def test_short_header(self, tmp_path):
        p = _write(tmp_path, "a,b\n1,2\n")
        with pytest.raises(DatasetFormatError):
            load_csv(p, 2)

    def test_all_rows_filtered(self, tmp_path):
        p = _write(tmp_path, "a,b,y\n1,,3\n,5,6\n")
        with pytest.raises(EmptyDatasetError):
            load_csv(p, 2)

    def test_wide_csv_with_configured_column_count(self, tmp_path):
        # U-Bend-like: many feature columns, two targets.
        rng = np.random.default_rng(0)
        header = ",".join([f"p{i}" for i in range(28)] + ["jp", "jt"])
        rows = "\n".join(",".join(str(v) for v in rng.uniform(size=30)) for _ in range(5))
        p = _write(tmp_path, header + "\n" + rows + "\n")
        ds, dropped = load_csv(p, 28)
        assert ds.n_features == 28 and ds.n_targets == 2 and dropped == 0

    def test_write_read_round_trip(self, tmp_path, rng):
        ds = TabularDataset(("a", "b"), ("y",), rng.normal(size=(7, 2)), rng.normal(size=(7, 1)))
        p = tmp_path / "rt.csv"
        write_csv(ds, p)
        back, dropped = load_csv(p, 2)
        assert dropped == 0
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.targets, ds.targets)


class TestDatasetInvariants:
    def test_rejects_nonfinite(self):
        with pytest.raises(DatasetFormatError):
            TabularDataset(("a",), ("y",), np.array([[np.nan]]), np.array([[1.0]]))

    def test_rejects_duplicate_names(self):
        with pytest.raises(DatasetFormatError):
            TabularDataset(("a",), ("a",), np.ones((1, 1)), np.ones((1, 1)))

    def test_rejects_row_mismatch(self):
        with pytest.raises(DatasetFormatError):
            TabularDataset(("a",), ("y",), np.ones((2, 1)), np.ones((3, 1)))

    def test_arrays_are_read_only(self):
        ds = TabularDataset(("a",), ("y",), np.ones((2, 1)), np.ones((2, 1)))
        with pytest.raises(ValueError):
            ds.features[0, 0] = 2.0


class TestSplit:
    def test_motor_like_counts(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(691, 1)), rng.normal(size=(691, 1)))
        train, test = split(ds, 0.2, seed=0)
        assert (train.n_rows, test.n_rows) == (552, 139)

    def test_ubend_like_counts(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(1000, 1)), rng.normal(size=(1000, 1)))
        train, test = split(ds, 0.2, seed=0)
        assert (train.n_rows, test.n_rows) == (800, 200)

    def test_same_seed_same_partition(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(50, 1)), rng.normal(size=(50, 1)))
        t1, s1 = split(ds, 0.3, seed=9)
        t2, s2 = split(ds, 0.3, seed=9)
        np.testing.assert_array_equal(t1.features, t2.features)
        np.testing.assert_array_equal(s1.features, s2.features)

    def test_is_a_partition(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(37, 1)), rng.normal(size=(37, 1)))
        train, test = split(ds, 0.25, seed=3)
        merged = np.sort(np.concatenate([train.features[:, 0], test.features[:, 0]]))
        np.testing.assert_array_equal(merged, np.sort(ds.features[:, 0]))

    def test_bad_fraction(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(10, 1)), rng.normal(size=(10, 1)))
        for frac in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                split(ds, frac, seed=0)

    def test_too_small(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(1, 1)), rng.normal(size=(1, 1)))
        with pytest.raises(ValueError):
            split(ds, 0.5, seed=0)


class TestScaler:
    def test_constant_column_rule(self):
        s = fit_scaler(np.array([[1.0], [1.0], [1.0]]), "standard")
        assert s.shift[0] == 1.0 and s.scale[0] == 1.0
        np.testing.assert_array_equal(apply_scaler(s, np.ones((3, 1))), np.zeros((3, 1)))

    def test_standard_mean_zero_unit_sample_variance(self):
        X = np.array([[0.0], [2.0]])
        s = fit_scaler(X, "standard")
        Z = apply_scaler(s, X)
        assert abs(Z.mean()) < 1e-15
        assert abs(Z.var(ddof=1) - 1.0) < 1e-12

    def test_round_trip_identity(self, rng):
        X = rng.normal(size=(40, 6)) * rng.uniform(0.1, 100.0, size=6)
        for kind in ("standard", "minmax"):
            s = fit_scaler(X, kind)
            back = invert_scaler(s, apply_scaler(s, X))
            assert np.max(np.abs(back - X) / np.maximum(np.abs(X), 1e-300)) < 1e-12

    def test_minmax_maps_to_unit_interval(self, rng):
        X = rng.normal(size=(25, 3))
        Z = apply_scaler(fit_scaler(X, "minmax"), X)
        assert Z.min() >= -1e-12 and Z.max() <= 1 + 1e-12

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            fit_scaler(np.ones((1, 2)), "standard")

    def test_fits_dataset_features(self, rng):
        ds = TabularDataset(("a",), ("y",), rng.normal(size=(10, 1)), rng.normal(size=(10, 1)))
        s = fit_scaler(ds, "standard")
        assert abs(s.shift[0] - ds.features[:, 0].mean()) < 1e-12


class TestSampling:
    def test_lhd_stratification_1d(self):
        X = latin_hypercube(4, FeatureBounds([0.0], [1.0]), seed=5)
        counts, _ = np.histogram(X[:, 0], bins=np.linspace(0, 1, 5))
        np.testing.assert_array_equal(counts, [1, 1, 1, 1])

    def test_lhd_stratification_many_dims(self, rng):
        lower = rng.uniform(-10, 0, size=15)
        upper = lower + rng.uniform(0.5, 20, size=15)
        bounds = FeatureBounds(lower, upper)
        n = 100
        X = latin_hypercube(n, bounds, seed=11)
        for j in range(15):
            edges = np.linspace(lower[j], upper[j], n + 1)
            counts, _ = np.histogram(X[:, j], bins=edges)
            np.testing.assert_array_equal(counts, np.ones(n, dtype=int))

    def test_lhd_property_random_sizes(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 40))
            d = int(rng.integers(1, 6))
            seed = int(rng.integers(0, 10000))
            X = latin_hypercube(n, FeatureBounds(np.zeros(d), np.ones(d)), seed=seed)
            for j in range(d):
                strata = np.floor(X[:, j] * n).astype(int)
                strata = np.clip(strata, 0, n - 1)
                assert sorted(strata) == list(range(n))

    def test_lhd_degenerate_bounds(self):
        X = latin_hypercube(3, FeatureBounds([0.5], [0.5]), seed=1)
        np.testing.assert_array_equal(X, np.full((3, 1), 0.5))

    def test_lhd_deterministic(self):
        b = FeatureBounds(np.zeros(3), np.ones(3))
        np.testing.assert_array_equal(latin_hypercube(8, b, 2), latin_hypercube(8, b, 2))

    def test_uniform_deterministic_single_point(self):
        b = FeatureBounds(np.zeros(2), np.ones(2))
        np.testing.assert_array_equal(uniform_random(1, b, 3), uniform_random(1, b, 3))

    def test_uniform_mean_close_to_center(self):
        X = uniform_random(10000, FeatureBounds([0.0], [1.0]), seed=4)
        assert abs(X.mean() - 0.5) < 0.02

    def test_uniform_degenerate_bounds(self):
        X = uniform_random(5, FeatureBounds([2.0], [2.0]), seed=0)
        np.testing.assert_array_equal(X, np.full((5, 1), 2.0))
