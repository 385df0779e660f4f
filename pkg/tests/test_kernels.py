"""Cross-backend agreement between the compiled and numpy kernels."""

import numpy as np
import pytest

from assort import kernels
from assort.kernels import numpy_backend

try:
    from assort.kernels import _ckernels
except ImportError:
    _ckernels = None

requires_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def random_problem(seed, n=13, d=21, h=6):
    rng = np.random.default_rng(seed)
    X = np.ascontiguousarray(rng.normal(size=(n, d)))
    y = (rng.random(n) > 0.5).astype(float)
    w = np.where(y > 0.5, 1.7, 1.0)
    W1 = np.ascontiguousarray(rng.normal(size=(h, d)) * 0.3)
    b1 = rng.normal(size=h) * 0.1
    W2 = rng.normal(size=h) * 0.3
    b2 = float(rng.normal()) * 0.1
    return X, y, w, W1, b1, W2, b2


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "numpy")


@requires_compiled
@pytest.mark.parametrize("seed", range(5))
def test_forward_agreement(seed):
    X, y, w, W1, b1, W2, b2 = random_problem(seed)
    lam_np, hidden_np = numpy_backend.forward(X, W1, b1, W2, b2)
    lam_c, hidden_c = _ckernels.forward(X, W1, b1, W2, b2)
    np.testing.assert_allclose(lam_c, lam_np, rtol=0, atol=1e-12)
    np.testing.assert_allclose(hidden_c, hidden_np, rtol=0, atol=1e-12)


@requires_compiled
@pytest.mark.parametrize("seed", range(5))
def test_gradient_agreement(seed):
    X, y, w, W1, b1, W2, b2 = random_problem(seed)
    results_np = numpy_backend.batch_gradients(X, y, w, W1, b1, W2, b2)
    results_c = _ckernels.batch_gradients(X, y, w, W1, b1, W2, b2)
    for a, b in zip(results_np, results_c):
        np.testing.assert_allclose(np.asarray(b), np.asarray(a), rtol=0, atol=1e-12)


@requires_compiled
def test_adam_agreement():
    rng = np.random.default_rng(3)
    p_np = rng.normal(size=40)
    p_c = p_np.copy()
    m_np = np.zeros(40); v_np = np.zeros(40)
    m_c = np.zeros(40); v_c = np.zeros(40)
    for t in range(1, 6):
        g = rng.normal(size=40)
        numpy_backend.adam_step(p_np, g, m_np, v_np, t, 1e-3, 0.9, 0.999, 1e-8)
        _ckernels.adam_step(p_c, g, m_c, v_c, t, 1e-3, 0.9, 0.999, 1e-8)
    np.testing.assert_allclose(p_c, p_np, rtol=0, atol=1e-14)


@requires_compiled
def test_short_training_agreement(monkeypatch):
    """A few full training epochs stay within tight tolerance across backends."""
    from assort import fnn

    rng = np.random.default_rng(11)
    X = rng.normal(size=(64, 12))
    y = (X[:, 0] + 0.3 * rng.normal(size=64) > 0).astype(float)
    dataset = list(zip(X, y))
    config = fnn.TrainConfig(learning_rate=1e-3, epochs=5, hidden_width=8, batch_size=16, seed=2)
    model = fnn.init_fnn(0, 12, 8)

    monkeypatch.setattr(fnn, "kernels", numpy_backend)
    trained_np = fnn.train(model, dataset, config)
    monkeypatch.setattr(fnn, "kernels", _ckernels)
    trained_c = fnn.train(model, dataset, config)

    np.testing.assert_allclose(trained_c.W1, trained_np.W1, rtol=0, atol=1e-10)
    np.testing.assert_allclose(trained_c.W2, trained_np.W2, rtol=0, atol=1e-10)
    assert trained_c.b2 == pytest.approx(trained_np.b2, abs=1e-10)
