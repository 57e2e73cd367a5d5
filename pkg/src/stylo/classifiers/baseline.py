"""Constant-prediction majority baseline."""

from __future__ import annotations

import numpy as np

from .base import BaseClassifier, TrainingMatrix


class MajorityClassifier(BaseClassifier):
    """Always predicts the most frequent training label; count ties go to
    the lexicographically smallest label string."""

    kind = "majority"

    def _fit(self, matrix: TrainingMatrix) -> None:
        counts = matrix.class_counts()
        top = counts.max()
        tied = [i for i in range(matrix.n_classes) if counts[i] == top]
        self.majority_index_ = min(tied, key=lambda i: matrix.label_space.labels[i])

    def _predict_indices(self, rows) -> np.ndarray:
        return np.full(len(rows), self.majority_index_, dtype=np.int64)
