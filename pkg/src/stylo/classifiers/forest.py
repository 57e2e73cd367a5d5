"""Random forest: bagged CART trees with per-node feature subsampling."""

from __future__ import annotations

import math

import numpy as np

from ..errors import DataError
from ..rng import SplitMix64
from .base import BaseClassifier, TrainingMatrix
from .tree import FeatureMatrix, build_classification_tree, tree_apply


class RandomForest(BaseClassifier):
    """Plurality vote over seeded bootstrap CART trees.

    Tree t uses SplitMix64(seed + t); the stream is consumed in a pinned
    order: n bootstrap draws first, then ceil(sqrt(d)) feature indices per
    node in build order (node, then left subtree, then right). Vote ties go
    to the smallest label index. With bootstrap=False and max_features=None
    a single tree degenerates to DecisionTree exactly.
    """

    kind = "rforest"

    def __init__(self, n_trees: int = 100, seed: int = 0, bootstrap: bool = True,
                 max_features: int | str | None = "sqrt",
                 max_depth: int | None = None, min_samples_leaf: int = 1):
        self.n_trees = n_trees
        self.seed = seed
        self.bootstrap = bootstrap
        self.max_features = max_features
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def _features_per_split(self, d: int) -> int | None:
        if self.max_features is None:
            return None
        if self.max_features == "sqrt":
            return min(d, math.ceil(math.sqrt(d)))
        m = int(self.max_features)
        if not 1 <= m <= d:
            raise DataError(f"max_features={m} out of range for {d} features")
        return m

    def _fit(self, matrix: TrainingMatrix) -> None:
        if self.n_trees < 1:
            raise DataError("n_trees must be >= 1")
        fm = FeatureMatrix(matrix.rows)
        labels = matrix.label_array()
        n, d, k = matrix.n, matrix.dimension, matrix.n_classes
        m_features = self._features_per_split(d)
        trees = []
        for t in range(self.n_trees):
            rng = SplitMix64(self.seed + t)
            if self.bootstrap:
                rows = np.array([rng.next_below(n) for _ in range(n)], dtype=np.int64)
            else:
                rows = np.arange(n, dtype=np.int64)
            sampler = None
            if m_features is not None:
                def sampler(rng=rng, m=m_features):
                    return np.array(sorted(rng.sample_indices(d, m)), dtype=np.int64)
            trees.append(
                build_classification_tree(fm, labels, k, rows, self.max_depth,
                                          self.min_samples_leaf, sampler)
            )
        self.trees_ = trees
        self.n_classes_ = k

    def _predict_indices(self, rows) -> np.ndarray:
        out = np.empty(len(rows), dtype=np.int64)
        for i, row in enumerate(rows):
            values = row.to_dict()
            votes = np.zeros(self.n_classes_, dtype=np.int64)
            for tree in self.trees_:
                votes[int(np.argmax(tree_apply(tree, values)))] += 1
            out[i] = int(np.argmax(votes))
        return out
