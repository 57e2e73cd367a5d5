"""Shared classifier plumbing: the training matrix, the estimator base class,
and input validation helpers.

Every classifier follows the sklearn estimator convention: hyperparameters
in ``__init__``, ``fit(X, y)`` returning self, fitted state in trailing-
underscore attributes, ``predict`` returning label strings. Training wall
time is captured on every fit because the result tables report it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ..corpus import LabelSpace
from ..errors import DataError
from ..vectors import SparseVector, to_csr


@dataclass
class TrainingMatrix:
    """Rows of equal dimension plus integer-encoded labels."""

    rows: list[SparseVector]
    labels: list[int]
    label_space: LabelSpace

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise DataError(
                f"{len(self.rows)} rows but {len(self.labels)} labels"
            )
        if not self.rows:
            raise DataError("training matrix needs at least one row")
        dim = self.rows[0].dimension
        for i, row in enumerate(self.rows):
            if row.dimension != dim:
                raise DataError(f"row {i} has dimension {row.dimension}, expected {dim}")
        k = len(self.label_space)
        for i, lbl in enumerate(self.labels):
            if not 0 <= lbl < k:
                raise DataError(f"label index {lbl} at row {i} out of range")

    @classmethod
    def from_labels(cls, rows: list[SparseVector], labels: list[str],
                    label_space: LabelSpace | None = None) -> "TrainingMatrix":
        if label_space is None:
            seen: list[str] = []
            for lbl in labels:
                if lbl not in seen:
                    seen.append(lbl)
            label_space = LabelSpace(labels=tuple(seen))
        return cls(rows=rows,
                   labels=[label_space.index(lbl) for lbl in labels],
                   label_space=label_space)

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def dimension(self) -> int:
        return self.rows[0].dimension

    @property
    def n_classes(self) -> int:
        return len(self.label_space)

    def csr(self):
        return to_csr(self.rows)

    def label_array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def onehot(self) -> np.ndarray:
        out = np.zeros((self.n, self.n_classes), dtype=np.float64)
        out[np.arange(self.n), self.labels] = 1.0
        return out

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.label_array(), minlength=self.n_classes)


def check_rows(rows: list[SparseVector], expected_dim: int) -> None:
    for i, row in enumerate(rows):
        if row.dimension != expected_dim:
            raise DataError(
                f"row {i} has dimension {row.dimension}, model expects {expected_dim}"
            )


class BaseClassifier(BaseEstimator):
    """Template for all model kinds; subclasses implement _fit and
    _predict_indices."""

    kind = ""

    def fit(self, X: list[SparseVector], y: list[str] | list[int],
            label_space: LabelSpace | None = None) -> "BaseClassifier":
        if y and isinstance(y[0], str):
            matrix = TrainingMatrix.from_labels(X, list(y), label_space)
        else:
            if label_space is None:
                raise DataError("integer labels need an explicit label space")
            matrix = TrainingMatrix(rows=X, labels=list(y), label_space=label_space)
        start = time.perf_counter()
        self._fit(matrix)
        self.training_time_ = time.perf_counter() - start
        self.label_space_ = matrix.label_space
        self.classes_ = matrix.label_space.labels
        self.feature_dimension_ = matrix.dimension
        return self

    def _fit(self, matrix: TrainingMatrix) -> None:
        raise NotImplementedError

    def _predict_indices(self, rows: list[SparseVector]) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: list[SparseVector]) -> list[str]:
        self.require_fitted()
        check_rows(X, self.feature_dimension_)
        if not X:
            return []
        return [self.classes_[i] for i in self._predict_indices(X)]

    def require_fitted(self) -> None:
        if not hasattr(self, "feature_dimension_"):
            raise DataError(f"{type(self).__name__} is not fitted")


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def logsumexp(scores: np.ndarray) -> np.ndarray:
    m = scores.max(axis=1)
    return m + np.log(np.exp(scores - m[:, None]).sum(axis=1))


def mean_cross_entropy(scores: np.ndarray, label_idx: np.ndarray) -> float:
    """Mean multinomial log-loss of raw scores against integer labels."""
    lse = logsumexp(scores)
    return float(np.mean(lse - scores[np.arange(scores.shape[0]), label_idx]))
