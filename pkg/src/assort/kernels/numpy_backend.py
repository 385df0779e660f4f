"""Numpy implementation of the hot training kernels.

Reference semantics for the compiled backend: a one-hidden-layer network
(rectifier hidden, sigmoid output), weighted binary cross-entropy with
probability clamping at 1e-12, and Adam with bias correction. All arrays
are float64.
"""

import numpy as np
from scipy.special import expit

CLAMP = 1e-12


def forward(X, W1, b1, W2, b2):
    """Batch forward pass. Returns (lam, hidden) with shapes (n,), (n, H)."""
    hidden = np.maximum(X @ W1.T + b1, 0.0)
    lam = expit(hidden @ W2 + b2)
    return lam, hidden


def batch_gradients(X, y, sample_weight, W1, b1, W2, b2):
    """Fused forward/backward. Returns (loss, gW1, gb1, gW2, gb2).

    Loss is the 1/n-weighted sum of per-example BCE terms; gradients match
    the unclamped sigmoid/BCE composition.
    """
    n = X.shape[0]
    pre = X @ W1.T + b1
    hidden = np.maximum(pre, 0.0)
    lam = expit(hidden @ W2 + b2)

    p = np.clip(lam, CLAMP, 1.0 - CLAMP)
    per_example = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    loss = float(np.sum(sample_weight * per_example) / n)

    delta = sample_weight * (lam - y) / n  # (n,)
    gW2 = hidden.T @ delta
    gb2 = float(np.sum(delta))
    dh = np.outer(delta, W2)
    dh[pre <= 0.0] = 0.0
    gW1 = dh.T @ X
    gb1 = dh.sum(axis=0)
    return loss, gW1, gb1, gW2, gb2


def adam_step(param, grad, m, v, t, lr, beta1, beta2, eps):
    """In-place Adam update with bias correction; t is the 1-based step count."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    param -= lr * m_hat / (np.sqrt(v_hat) + eps)
