"""Multiclass gradient boosting on multinomial log-loss.

Per-class additive score functions start at the log class priors. Each
stage fits one regression tree per class to the residuals y_ic - p_ic
(the negative loss gradient) with variance-reduction splits; leaf values
are the Newton step sum(r) / sum(|r| * (1-|r|)), denominator floored at
1e-8, scaled by the learning rate. Prediction is the argmax of the final
scores; probabilities are their softmax. The training log-loss after each
stage is recorded in ``train_loss_trace_``.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..vectors import SparseVector
from .base import BaseClassifier, TrainingMatrix, mean_cross_entropy, softmax
from .tree import FeatureMatrix, TreeNode, build_regression_tree, tree_apply

_NEWTON_FLOOR = 1e-8
_PRIOR_FLOOR = 1e-12


def _newton_leaf(residuals: np.ndarray, learning_rate: float) -> float:
    num = residuals.sum()
    den = max(float(np.abs(residuals * (1.0 - np.abs(residuals))).sum()), _NEWTON_FLOOR)
    return learning_rate * num / den


class GradientBoosting(BaseClassifier):
    kind = "gboost"

    def __init__(self, n_stages: int = 100, learning_rate: float = 0.1,
                 max_depth: int = 3, min_samples_leaf: int = 1):
        self.n_stages = n_stages
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def _fit(self, matrix: TrainingMatrix) -> None:
        if self.n_stages < 1:
            raise DataError("n_stages must be >= 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise DataError("learning_rate must be in (0, 1]")
        if len(set(matrix.labels)) < 2:
            raise DataError("gradient boosting needs at least 2 classes present")
        fm = FeatureMatrix(matrix.rows)
        labels = matrix.label_array()
        onehot = matrix.onehot()
        n, k = matrix.n, matrix.n_classes
        priors = matrix.class_counts() / n
        self.log_priors_ = np.log(np.maximum(priors, _PRIOR_FLOOR))
        scores = np.tile(self.log_priors_, (n, 1))
        all_rows = np.arange(n, dtype=np.int64)
        losses = [mean_cross_entropy(scores, labels)]
        stages: list[list[TreeNode]] = []
        for _ in range(self.n_stages):
            probs = softmax(scores)
            stage_trees = []
            for c in range(k):
                residuals = onehot[:, c] - probs[:, c]
                train_values = np.zeros(n, dtype=np.float64)
                tree = build_regression_tree(
                    fm, residuals, all_rows, self.max_depth, self.min_samples_leaf,
                    lambda r: _newton_leaf(r, self.learning_rate), train_values,
                )
                stage_trees.append(tree)
                scores[:, c] += train_values
            stages.append(stage_trees)
            losses.append(mean_cross_entropy(scores, labels))
        self.stages_ = stages
        self.train_loss_trace_ = losses

    def decision_scores(self, rows: list[SparseVector]) -> np.ndarray:
        self.require_fitted()
        scores = np.tile(self.log_priors_, (len(rows), 1))
        for i, row in enumerate(rows):
            values = row.to_dict()
            for stage_trees in self.stages_:
                for c, tree in enumerate(stage_trees):
                    scores[i, c] += tree_apply(tree, values)[0]
        return scores

    def predict_proba(self, rows) -> np.ndarray:
        return softmax(self.decision_scores(rows))

    def _predict_indices(self, rows) -> np.ndarray:
        return self.decision_scores(rows).argmax(axis=1)
