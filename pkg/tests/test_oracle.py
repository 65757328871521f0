import numpy as np
import pytest

from surropt.errors import EmptyDatasetError
from surropt.oracle import (
    CONSTRAINT_VIOLATED,
    OUT_OF_BOUNDS,
    evaluate_batch,
    generate_dataset,
    get_problem,
    true_front,
)


class TestZdtClosedForms:
    def test_zdt1_at_origin(self):
        out = evaluate_batch(get_problem("zdt1"), np.zeros((1, 30)))[0]
        assert out.ok
        np.testing.assert_allclose(out.objectives, [0.0, 1.0], atol=1e-15)

    def test_zdt1_at_unit_first_coordinate(self):
        x = np.zeros((1, 30))
        x[0, 0] = 1.0
        out = evaluate_batch(get_problem("zdt1"), x)[0]
        np.testing.assert_allclose(out.objectives, [1.0, 0.0], atol=1e-15)

    def test_zdt2_front_equation(self):
        tf = true_front(get_problem("zdt2"), 50)
        np.testing.assert_allclose(tf[:, 1], 1.0 - tf[:, 0] ** 2, atol=1e-12)

    def test_out_of_bounds_marked(self):
        x = np.zeros((1, 30))
        x[0, 3] = 1.5
        out = evaluate_batch(get_problem("zdt1"), x)[0]
        assert not out.ok and out.reason == OUT_OF_BOUNDS


class TestTrueFronts:
    def test_zdt1_two_points_are_endpoints(self):
        tf = true_front(get_problem("zdt1"), 2)
        np.testing.assert_allclose(tf, [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)

    def test_zdt1_defining_equation(self):
        tf = true_front(get_problem("zdt1"), 333)
        np.testing.assert_allclose(tf[:, 1], 1.0 - np.sqrt(tf[:, 0]), atol=1e-12)

    def test_dtlz2_front_on_unit_sphere(self):
        tf = true_front(get_problem("dtlz2"), 200)
        np.testing.assert_allclose(np.linalg.norm(tf, axis=1), 1.0, atol=1e-12)

    def test_zdt3_points_on_curve_and_nondominated(self):
        tf = true_front(get_problem("zdt3"), 100)
        t = tf[:, 0]
        expected = 1.0 - np.sqrt(t) - t * np.sin(10 * np.pi * t)
        np.testing.assert_allclose(tf[:, 1], expected, atol=1e-12)
        # mutual non-dominance
        for i in range(len(tf)):
            dominated = ((tf <= tf[i]).all(axis=1) & (tf < tf[i]).any(axis=1)).any()
            assert not dominated

    def test_front_unavailable_error(self):
        import dataclasses

        bad = dataclasses.replace(get_problem("zdt1"), true_front_available=False)
        with pytest.raises(ValueError):
            true_front(bad, 5)


@pytest.mark.parametrize("name", ["zdt1", "zdt2", "dtlz2", "zdt1-disk"])
def test_no_random_point_dominates_the_true_front(name):
    problem = get_problem(name)
    tf = true_front(problem, 60)
    rng = np.random.default_rng(99)
    X = rng.uniform(size=(100_000, problem.n_vars))
    F, reasons = problem.evaluate_matrix(X)
    F = F[np.isfinite(F).all(axis=1)]
    eps = 1e-9  # guard against float round-off at the front itself
    for p in tf:
        dominating = (F <= p + eps).all(axis=1) & (F < p - eps).any(axis=1)
        assert not dominating.any()


class TestEvaluateBatch:
    def test_purity_bitwise(self):
        problem = get_problem("dtlz2")
        X = np.random.default_rng(1).uniform(size=(64, problem.n_vars))
        F1, _ = problem.evaluate_matrix(X)
        F2, _ = problem.evaluate_matrix(X)
        np.testing.assert_array_equal(F1, F2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            get_problem("zdt1").evaluate_matrix(np.zeros((2, 7)))

    def test_disk_constraint_reason(self):
        problem = get_problem("zdt1-disk")
        X = np.full((1, 3), 0.5)
        out = evaluate_batch(problem, X)[0]
        assert not out.ok and out.reason == CONSTRAINT_VIOLATED


class TestGenerateDataset:
    def test_zdt1_lhd_800_no_infeasible(self):
        ds, dropped = generate_dataset(get_problem("zdt1"), "lhd", 800, seed=6)
        assert ds.n_rows == 800 and dropped == 0
        assert ds.target_names == ("f1", "f2")

    def test_disk_drops_are_counted_and_match_direct_check(self):
        problem = get_problem("zdt1-disk")
        ds, dropped = generate_dataset(problem, "uniform", 1000, seed=8)
        assert ds.n_rows < 1000
        assert ds.n_rows + dropped == 1000
        # every surviving row satisfies the constraint; the excluded ball is empty
        assert (((ds.features - 0.5) ** 2).sum(axis=1) >= 0.04).all()

    def test_disk_uniform_failure_rate_is_a_few_percent(self):
        problem = get_problem("zdt1-disk")
        rng = np.random.default_rng(123)
        X = rng.uniform(size=(100_000, 3))
        rate = float((((X - 0.5) ** 2).sum(axis=1) < 0.04).mean())
        # measured, not assumed: volume of a radius-0.2 ball in 3-D is ~3.35%
        assert 0.02 < rate < 0.06

    def test_deterministic(self):
        a, _ = generate_dataset(get_problem("zdt1"), "lhd", 50, seed=3)
        b, _ = generate_dataset(get_problem("zdt1"), "lhd", 50, seed=3)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.targets, b.targets)

    def test_unknown_sampler(self):
        with pytest.raises(ValueError):
            generate_dataset(get_problem("zdt1"), "sobol", 10, seed=0)
