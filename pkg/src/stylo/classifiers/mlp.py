"""Single-hidden-layer perceptron with ReLU and softmax output.

Weights are initialized from the toolkit PRNG (uniform Glorot bounds) so
training is reproducible bit for bit with a fixed seed; optimization is
deterministic full-batch gradient descent.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DataError
from ..rng import derive_seed, unit_stream
from ..vectors import to_csr
from .base import BaseClassifier, TrainingMatrix, mean_cross_entropy, softmax


def glorot_uniform(seed: int, fan_in: int, fan_out: int) -> np.ndarray:
    """(fan_in, fan_out) matrix filled row-major with uniform(-s, s),
    s = sqrt(6/(fan_in+fan_out)), drawn from SplitMix64(seed)."""
    s = math.sqrt(6.0 / (fan_in + fan_out))
    units = unit_stream(seed, fan_in * fan_out)
    return ((units * 2.0 - 1.0) * s).reshape(fan_in, fan_out)


def mlp_loss_and_grads(X, onehot: np.ndarray, w1, b1, w2, b2):
    """Forward + backward pass. Standalone for gradient-check tests."""
    n = onehot.shape[0]
    z1 = X @ w1 + b1
    a1 = np.maximum(z1, 0.0)
    scores = a1 @ w2 + b2
    loss = mean_cross_entropy(scores, onehot.argmax(axis=1))
    g = (softmax(scores) - onehot) / n
    grad_w2 = a1.T @ g
    grad_b2 = g.sum(axis=0)
    g_hidden = (g @ w2.T) * (z1 > 0.0)
    grad_w1 = X.T @ g_hidden
    grad_b1 = g_hidden.sum(axis=0)
    return loss, grad_w1, grad_b1, grad_w2, grad_b2


class MLPClassifier(BaseClassifier):
    kind = "mlp"

    def __init__(self, hidden: int = 100, epochs: int = 200, lr: float = 0.01,
                 seed: int = 0):
        self.hidden = hidden
        self.epochs = epochs
        self.lr = lr
        self.seed = seed

    def _fit(self, matrix: TrainingMatrix) -> None:
        if len(set(matrix.labels)) < 2:
            raise DataError("MLP needs at least 2 classes present")
        if self.hidden < 1:
            raise DataError("hidden layer size must be >= 1")
        X = matrix.csr()
        onehot = matrix.onehot()
        d, h, k = matrix.dimension, self.hidden, matrix.n_classes
        w1 = glorot_uniform(derive_seed(self.seed, 1), d, h)
        b1 = np.zeros(h, dtype=np.float64)
        w2 = glorot_uniform(derive_seed(self.seed, 2), h, k)
        b2 = np.zeros(k, dtype=np.float64)
        for epoch in range(self.epochs):
            loss, gw1, gb1, gw2, gb2 = mlp_loss_and_grads(X, onehot, w1, b1, w2, b2)
            if not math.isfinite(loss):
                raise DataError(
                    f"non-finite training loss at epoch {epoch}; reduce the learning rate"
                )
            w1 -= self.lr * gw1
            b1 -= self.lr * gb1
            w2 -= self.lr * gw2
            b2 -= self.lr * gb2
        self.w1_, self.b1_, self.w2_, self.b2_ = w1, b1, w2, b2

    def decision_scores(self, rows) -> np.ndarray:
        self.require_fitted()
        a1 = np.maximum(to_csr(rows) @ self.w1_ + self.b1_, 0.0)
        return a1 @ self.w2_ + self.b2_

    def predict_proba(self, rows) -> np.ndarray:
        return softmax(self.decision_scores(rows))

    def _predict_indices(self, rows) -> np.ndarray:
        return self.decision_scores(rows).argmax(axis=1)
