"""Linear models trained by deterministic full-batch (sub)gradient descent:
multinomial logistic regression and one-vs-rest linear SVM.

Full-batch updates were chosen over stochastic ones so that retraining on
the same inputs is bit-identical run to run.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DataError
from ..vectors import to_csr
from .base import BaseClassifier, TrainingMatrix, logsumexp, mean_cross_entropy, softmax


def logreg_loss_and_grads(X, onehot: np.ndarray, weights: np.ndarray,
                          bias: np.ndarray, l2: float):
    """Mean cross-entropy + (l2/2)*||W||^2 and its gradients.

    Kept as a standalone function so gradient-check tests can evaluate the
    loss at perturbed parameters.
    """
    n = onehot.shape[0]
    scores = X @ weights + bias
    label_idx = onehot.argmax(axis=1)
    loss = mean_cross_entropy(scores, label_idx) + 0.5 * l2 * float((weights ** 2).sum())
    probs = softmax(scores)
    g = (probs - onehot) / n
    grad_w = X.T @ g + l2 * weights
    grad_b = g.sum(axis=0)
    return loss, grad_w, grad_b


class LogisticRegression(BaseClassifier):
    """Multinomial logistic regression, zero-initialized, full-batch GD.

    The bias is not regularized. Prediction is the argmax of softmax scores
    (first index wins exact ties).
    """

    kind = "logreg"

    def __init__(self, l2: float = 1e-4, epochs: int = 200, lr: float = 0.5):
        self.l2 = l2
        self.epochs = epochs
        self.lr = lr

    def _fit(self, matrix: TrainingMatrix) -> None:
        if len(set(matrix.labels)) < 2:
            raise DataError("logistic regression needs at least 2 classes present")
        X = matrix.csr()
        onehot = matrix.onehot()
        d, k = matrix.dimension, matrix.n_classes
        weights = np.zeros((d, k), dtype=np.float64)
        bias = np.zeros(k, dtype=np.float64)
        for epoch in range(self.epochs):
            loss, grad_w, grad_b = logreg_loss_and_grads(X, onehot, weights, bias, self.l2)
            if not math.isfinite(loss):
                raise DataError(
                    f"non-finite training loss at epoch {epoch}; reduce the learning rate"
                )
            weights -= self.lr * grad_w
            bias -= self.lr * grad_b
        self.weights_ = weights
        self.bias_ = bias

    def decision_scores(self, rows) -> np.ndarray:
        self.require_fitted()
        return to_csr(rows) @ self.weights_ + self.bias_

    def predict_proba(self, rows) -> np.ndarray:
        return softmax(self.decision_scores(rows))

    def _predict_indices(self, rows) -> np.ndarray:
        return self.decision_scores(rows).argmax(axis=1)


class LinearSVM(BaseClassifier):
    """One-vs-rest linear SVMs on L2-regularized hinge loss.

    Pegasos-style deterministic subgradient descent: one full-batch step per
    epoch with step size 1/(lambda*t), lambda = 1/(C*n). The returned
    weights are the average of the iterates over the second half of the
    schedule (the raw last iterate of subgradient descent oscillates; the
    suffix average is the stable, analysis-backed output). No intercept, so
    decision values are exactly linear in the input.
    """

    kind = "linsvm"

    def __init__(self, C: float = 1.0, epochs: int = 200):
        self.C = C
        self.epochs = epochs

    def _fit(self, matrix: TrainingMatrix) -> None:
        if len(set(matrix.labels)) < 2:
            raise DataError("linear SVM needs at least 2 classes present")
        if self.epochs < 1:
            raise DataError("epochs must be >= 1")
        X = matrix.csr()
        n, d, k = matrix.n, matrix.dimension, matrix.n_classes
        labels = matrix.label_array()
        lam = 1.0 / (self.C * n)
        avg_from = self.epochs // 2 + 1
        weights = np.zeros((k, d), dtype=np.float64)
        for c in range(k):
            y = np.where(labels == c, 1.0, -1.0)
            w = np.zeros(d, dtype=np.float64)
            w_sum = np.zeros(d, dtype=np.float64)
            for t in range(1, self.epochs + 1):
                margins = y * (X @ w)
                violators = margins < 1.0
                subgrad = lam * w
                if violators.any():
                    subgrad = subgrad - (X[violators].T @ y[violators]) / n
                w = w - subgrad / (lam * t)
                if not np.all(np.isfinite(w)):
                    raise DataError(f"non-finite SVM weights at step {t} for class {c}")
                if t >= avg_from:
                    w_sum += w
            weights[c] = w_sum / (self.epochs - avg_from + 1)
        self.weights_ = weights

    def decision_scores(self, rows) -> np.ndarray:
        self.require_fitted()
        return to_csr(rows) @ self.weights_.T

    def _predict_indices(self, rows) -> np.ndarray:
        return self.decision_scores(rows).argmax(axis=1)
