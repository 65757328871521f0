import numpy as np
import pytest

from surropt.dataset import TabularDataset
from surropt.errors import HyperparameterError, TrainingDivergedError
from surropt.surrogate import train_mlp
from surropt.surrogate.mlp import init_parameters, loss_and_gradients


def finite_difference_grads(weights, biases, activation, X, Y, wd, eps=1e-5):
    """Central-difference oracle for the loss gradient."""
    gW = [np.zeros_like(W) for W in weights]
    gb = [np.zeros_like(b) for b in biases]
    for li, W in enumerate(weights):
        for idx in np.ndindex(W.shape):
            Wp = [w.copy() for w in weights]
            Wm = [w.copy() for w in weights]
            Wp[li][idx] += eps
            Wm[li][idx] -= eps
            lp, _, _ = loss_and_gradients(Wp, biases, activation, X, Y, wd)
            lm, _, _ = loss_and_gradients(Wm, biases, activation, X, Y, wd)
            gW[li][idx] = (lp - lm) / (2 * eps)
    for li, b in enumerate(biases):
        for idx in np.ndindex(b.shape):
            bp = [v.copy() for v in biases]
            bm = [v.copy() for v in biases]
            bp[li][idx] += eps
            bm[li][idx] -= eps
            lp, _, _ = loss_and_gradients(weights, bp, activation, X, Y, wd)
            lm, _, _ = loss_and_gradients(weights, bm, activation, X, Y, wd)
            gb[li][idx] = (lp - lm) / (2 * eps)
    return gW, gb


@pytest.mark.parametrize("activation,wd", [("tanh", 0.0), ("relu", 0.0), ("tanh", 1e-3)])
def test_backprop_matches_finite_differences(activation, wd):
    rng = np.random.default_rng(17)
    weights, biases = init_parameters((2, 3, 1), activation, rng)
    X = rng.normal(size=(6, 2))
    Y = rng.normal(size=(6, 1))
    _, gW, gb = loss_and_gradients(weights, biases, activation, X, Y, wd)
    fW, fb = finite_difference_grads(weights, biases, activation, X, Y, wd)
    for a, b in list(zip(gW, fW)) + list(zip(gb, fb)):
        rel = np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-10)
        assert rel.max() < 1e-4


def test_fits_linear_target(rng):
    X = rng.uniform(size=(200, 1))
    ds = TabularDataset(("x",), ("y",), X, 2.0 * X)
    model = train_mlp(ds, {"hidden_sizes": (64,), "learning_rate": 0.05, "epochs": 2000}, seed=1)
    Xq = rng.uniform(size=(200, 1))
    mse = float(((model.predict(Xq) - 2.0 * Xq) ** 2).mean())
    assert mse < 1e-3


def test_zero_epochs_returns_finite_initialization(rng):
    X = rng.uniform(size=(50, 3))
    ds = TabularDataset(("a", "b", "c"), ("y",), X, rng.normal(size=(50, 1)))
    model = train_mlp(ds, {"epochs": 0}, seed=4)
    pred = model.predict(X)
    assert np.isfinite(pred).all()
    # same init under the same seed
    again = train_mlp(ds, {"epochs": 0}, seed=4)
    np.testing.assert_array_equal(model.predict(X), again.predict(X))


def test_divergence_raises_labeled_error(rng):
    X = rng.uniform(size=(64, 2))
    y = rng.normal(size=(64, 1))
    ds = TabularDataset(("a", "b"), ("y",), X, y)
    with pytest.raises(TrainingDivergedError):
        train_mlp(ds, {"learning_rate": 10.0, "epochs": 3000, "hidden_sizes": (64, 64)}, seed=0)


def test_deterministic_training(rng):
    X = rng.uniform(size=(80, 2))
    Y = np.column_stack([X[:, 0], X[:, 1] ** 2])
    ds = TabularDataset(("a", "b"), ("y1", "y2"), X, Y)
    hp = {"hidden_sizes": (16,), "learning_rate": 0.02, "epochs": 100, "batch_size": 32}
    m1 = train_mlp(ds, hp, seed=7)
    m2 = train_mlp(ds, hp, seed=7)
    for W1, W2 in zip(m1.weights, m2.weights):
        np.testing.assert_array_equal(W1, W2)


def test_multi_output_shapes(rng):
    X = rng.uniform(size=(40, 3))
    Y = rng.normal(size=(40, 2))
    ds = TabularDataset(("a", "b", "c"), ("u", "v"), X, Y)
    model = train_mlp(ds, {"epochs": 5}, seed=0)
    assert model.predict(X).shape == (40, 2)


def test_hp_validation():
    rng = np.random.default_rng(0)
    ds = TabularDataset(("a",), ("y",), rng.uniform(size=(10, 1)), rng.normal(size=(10, 1)))
    with pytest.raises(HyperparameterError):
        train_mlp(ds, {"activation": "sigmoid"}, seed=0)
    with pytest.raises(HyperparameterError):
        train_mlp(ds, {"hidden_sizes": ()}, seed=0)
    with pytest.raises(HyperparameterError):
        train_mlp(ds, {"nope": 3}, seed=0)
