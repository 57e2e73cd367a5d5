"""K-nearest-neighbors over sparse vectors, Euclidean distance."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..vectors import to_csr
from .base import BaseClassifier, TrainingMatrix


class KNearestNeighbors(BaseClassifier):
    """Majority vote among the k nearest training rows.

    Distance ties are broken toward the lower training-row index (stable
    sort over the distance array); vote ties toward the smallest label
    index among the tied labels.
    """

    kind = "knn"

    def __init__(self, k: int = 5):
        self.k = k

    def _fit(self, matrix: TrainingMatrix) -> None:
        if self.k < 1:
            raise DataError("k must be >= 1")
        if self.k > matrix.n:
            raise DataError(f"k={self.k} exceeds {matrix.n} training rows")
        self.train_matrix_ = matrix.csr()
        self.train_labels_ = matrix.label_array()
        self.train_sq_norms_ = np.asarray(
            self.train_matrix_.multiply(self.train_matrix_).sum(axis=1)
        ).ravel()
        self.n_classes_ = matrix.n_classes

    def _predict_indices(self, rows) -> np.ndarray:
        X = to_csr(rows)
        x_sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        # squared Euclidean distance; clamp tiny negatives from cancellation
        cross = (X @ self.train_matrix_.T).toarray()
        d2 = np.maximum(x_sq[:, None] - 2.0 * cross + self.train_sq_norms_[None, :], 0.0)
        out = np.empty(len(rows), dtype=np.int64)
        for i in range(len(rows)):
            order = np.argsort(d2[i], kind="stable")[: self.k]
            votes = np.bincount(self.train_labels_[order], minlength=self.n_classes_)
            out[i] = int(np.argmax(votes))
        return out
