"""Per-question-type sentence classifier: a one-hidden-layer feedforward
network mapping a sentence encoding to the probability that the sentence is
summative. Training uses Adam over shuffled minibatches; gradients are
verifiable against central finite differences via ``grad_check``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from assort import kernels
from assort.kernels.numpy_backend import CLAMP


@dataclass
class FnnModel:
    W1: np.ndarray  # (H, D_in)
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (H,)
    b2: float
    loss_history: list[float] = field(default_factory=list, repr=False)

    @property
    def input_dim(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden_width(self) -> int:
        return self.W1.shape[0]


@dataclass
class TrainConfig:
    learning_rate: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 512
    epochs: int = 150
    hidden_width: int = 256
    positive_weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "beta1", "beta2", "epsilon", "batch_size",
                     "epochs", "hidden_width", "positive_weight"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def init_fnn(seed: int, input_dim: int, hidden_width: int) -> FnnModel:
    """Glorot-uniform weights, zero biases, from a seeded generator."""
    if input_dim < 1 or hidden_width < 1:
        raise ValueError("input_dim and hidden_width must be >= 1")
    rng = np.random.default_rng(seed)
    limit1 = math.sqrt(6.0 / (input_dim + hidden_width))
    limit2 = math.sqrt(6.0 / (hidden_width + 1))
    return FnnModel(
        W1=rng.uniform(-limit1, limit1, size=(hidden_width, input_dim)),
        b1=np.zeros(hidden_width),
        W2=rng.uniform(-limit2, limit2, size=hidden_width),
        b2=0.0,
    )


def _check_input(model: FnnModel, X: np.ndarray):
    if X.shape[-1] != model.input_dim:
        raise ValueError(
            f"encoding length {X.shape[-1]} does not match model input dim {model.input_dim}"
        )


def forward(model: FnnModel, encoding) -> float:
    """Summative probability for one encoding; pure and deterministic.

    Clamped into the open interval at 1e-12 so saturated activations never
    round to exactly 0 or 1 (mirrors the loss clamp).
    """
    x = np.asarray(encoding, dtype=np.float64).reshape(1, -1)
    _check_input(model, x)
    lam, _ = kernels.forward(x, model.W1, model.b1, model.W2, model.b2)
    return float(min(max(lam[0], CLAMP), 1.0 - CLAMP))


def forward_batch(model: FnnModel, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    _check_input(model, X)
    lam, _ = kernels.forward(X, model.W1, model.b1, model.W2, model.b2)
    return np.clip(lam, CLAMP, 1.0 - CLAMP)


def _as_arrays(dataset):
    if not dataset:
        raise ValueError("empty batch")
    X = np.ascontiguousarray([enc for enc, _ in dataset], dtype=np.float64)
    y = np.asarray([float(label) for _, label in dataset])
    return X, y


def loss(model: FnnModel, batch) -> float:
    """Mean binary cross-entropy over the batch, clamped at 1e-12."""
    X, y = _as_arrays(batch)
    _check_input(model, X)
    lam = forward_batch(model, X)
    p = np.clip(lam, CLAMP, 1.0 - CLAMP)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def train(model: FnnModel, dataset, config: TrainConfig) -> FnnModel:
    """Adam over shuffled minibatches; returns a new model, input untouched."""
    X, y = _as_arrays(dataset)
    _check_input(model, X)
    if len(set(y.tolist())) < 2:
        raise ValueError("training data must contain both labels")

    weights = np.where(y > 0.5, config.positive_weight, 1.0)
    params = [
        np.ascontiguousarray(model.W1, dtype=np.float64).copy(),
        model.b1.copy(),
        model.W2.copy(),
        np.array([model.b2]),
    ]
    adam_m = [np.zeros_like(p) for p in params]
    adam_v = [np.zeros_like(p) for p in params]

    rng = np.random.default_rng(config.seed)
    n = X.shape[0]
    step = 0
    history = []
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        batches = 0
        for start in range(0, n, config.batch_size):
            sel = perm[start : start + config.batch_size]
            Xb = np.ascontiguousarray(X[sel])
            step += 1
            batch_loss, gW1, gb1, gW2, gb2 = kernels.batch_gradients(
                Xb, y[sel], weights[sel], params[0], params[1], params[2], params[3][0]
            )
            epoch_loss += batch_loss
            batches += 1
            for p, g, m, v in zip(params, [gW1, gb1, gW2, np.array([gb2])], adam_m, adam_v):
                kernels.adam_step(
                    p, g, m, v, step,
                    config.learning_rate, config.beta1, config.beta2, config.epsilon,
                )
        history.append(epoch_loss / batches)

    return FnnModel(
        W1=params[0], b1=params[1], W2=params[2], b2=float(params[3][0]),
        loss_history=history,
    )


def grad_check(model: FnnModel, example, epsilon: float = 1e-5) -> float:
    """Max relative error between analytic gradients and central differences."""
    encoding, label = example
    X = np.ascontiguousarray(encoding, dtype=np.float64).reshape(1, -1)
    y = np.asarray([float(label)])
    w = np.ones(1)
    _, gW1, gb1, gW2, gb2 = kernels.batch_gradients(
        X, y, w, model.W1, model.b1, model.W2, model.b2
    )
    analytic = np.concatenate([gW1.ravel(), gb1, gW2, [gb2]])

    flat = np.concatenate([model.W1.ravel(), model.b1, model.W2, [model.b2]])

    def loss_at(theta):
        h = model.hidden_width
        d = model.input_dim
        W1 = theta[: h * d].reshape(h, d)
        b1 = theta[h * d : h * d + h]
        W2 = theta[h * d + h : h * d + 2 * h]
        b2 = theta[-1]
        probe = FnnModel(W1=np.ascontiguousarray(W1), b1=b1, W2=W2, b2=float(b2))
        return loss(probe, [(encoding, label)])

    numeric = np.empty_like(flat)
    for i in range(flat.size):
        bump = np.zeros_like(flat)
        bump[i] = epsilon
        numeric[i] = (loss_at(flat + bump) - loss_at(flat - bump)) / (2.0 * epsilon)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))
