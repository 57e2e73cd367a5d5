"""CART decision trees over sparse feature vectors.

Split search never densifies the feature matrix: per node, the nonzero
entries of the node's rows are gathered and grouped by feature, and each
feature present in the node gets one synthetic segment aggregating the rows
where it is implicitly zero. Candidate thresholds are the midpoints between
consecutive distinct values; a candidate is admissible only when the float
midpoint actually separates the two values (guards against midpoints
rounding up onto the next value) and both sides have at least
``min_samples_leaf`` rows.

Classification split scoring is exact: candidates are compared as rational
numbers (maximize S_L/n_L + S_R/n_R with S = sum of squared class counts,
which is equivalent to minimizing weighted Gini impurity), so the chosen
split is bit-reproducible and matches a brute-force search including the
tie-breaks: lower feature index first, then lower threshold. A float
prefilter narrows the exact comparison to near-optimums.

Regression trees (used by gradient boosting) maximize the variance-
reduction proxy S_L^2/n_L + S_R^2/n_R on float residual sums with the same
tie-break order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..vectors import SparseVector, to_csr
from .base import BaseClassifier, TrainingMatrix


@dataclass
class TreeNode:
    """Either a split (feature, threshold, children) or a leaf (scores)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    scores: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.scores is not None


class FeatureMatrix:
    """Row- and column-oriented views of a sparse training matrix."""

    def __init__(self, rows: list[SparseVector]):
        csr = to_csr(rows)
        self.n_rows, self.n_features = csr.shape
        self._indptr = csr.indptr.astype(np.int64)
        self._indices = csr.indices.astype(np.int64)
        self._data = csr.data
        self._csc = csr.tocsc()

    def node_entries(self, node_rows: np.ndarray):
        """(feature, value, local_row) arrays of all nonzeros in node_rows.

        Rows may repeat (bootstrap samples); each occurrence contributes its
        entries again.
        """
        starts = self._indptr[node_rows]
        lens = self._indptr[node_rows + 1] - starts
        total = int(lens.sum())
        if total == 0:
            return (np.empty(0, dtype=np.int64), np.empty(0), np.empty(0, dtype=np.int64))
        local = np.repeat(np.arange(len(node_rows), dtype=np.int64), lens)
        shift = np.concatenate([[0], np.cumsum(lens)[:-1]])
        pos = np.arange(total, dtype=np.int64) - np.repeat(shift, lens) + np.repeat(starts, lens)
        return self._indices[pos], self._data[pos], local

    def feature_values(self, node_rows: np.ndarray, feature: int) -> np.ndarray:
        col = self._csc.getcol(feature)
        dense = np.zeros(self.n_rows, dtype=np.float64)
        dense[col.indices] = col.data
        return dense[node_rows]


def _segments(fm: FeatureMatrix, node_rows: np.ndarray, payload: np.ndarray,
              feature_subset: np.ndarray | None):
    """Per-feature value segments sorted by (feature, value).

    payload is an (n_node, p) array per local row; the synthetic zero
    segment of each present feature carries the aggregated payload of the
    node rows where the feature is zero. Returns None when the node has no
    nonzero entries among the considered features.
    """
    feat, val, local = fm.node_entries(node_rows)
    if feature_subset is not None and len(feat):
        keep = np.isin(feat, feature_subset)
        feat, val, local = feat[keep], val[keep], local[keep]
    if len(feat) == 0:
        return None
    n_node = len(node_rows)
    total_pay = payload.sum(axis=0)
    present, inverse, nnz_counts = np.unique(feat, return_inverse=True, return_counts=True)
    pay_nnz = np.zeros((len(present), payload.shape[1]), dtype=payload.dtype)
    np.add.at(pay_nnz, inverse, payload[local])
    zero_cnt = n_node - nnz_counts
    has_zero = zero_cnt > 0
    n_pseudo = int(has_zero.sum())
    e_feat = np.concatenate([feat, present[has_zero]])
    e_val = np.concatenate([val, np.zeros(n_pseudo)])
    e_cnt = np.concatenate([np.ones(len(feat), dtype=np.int64), zero_cnt[has_zero]])
    e_pay = np.concatenate([payload[local], total_pay[None, :] - pay_nnz[has_zero]])
    order = np.lexsort((e_val, e_feat))
    return e_feat[order], e_val[order], e_cnt[order], e_pay[order], n_node


def _candidates(e_feat, e_val, e_cnt, e_pay, n_node: int, min_leaf: int):
    """Admissible boundary candidates with left-side count and payload sums."""
    cum_cnt = np.cumsum(e_cnt)
    cum_pay = np.cumsum(e_pay, axis=0)
    boundary = (e_feat[:-1] == e_feat[1:]) & (e_val[:-1] < e_val[1:])
    thr = (e_val[:-1] + e_val[1:]) / 2.0
    boundary &= thr < e_val[1:]
    # left counts are cumulative over the whole array; subtract what belongs
    # to earlier features
    new_group = np.empty(len(e_feat), dtype=bool)
    new_group[0] = True
    new_group[1:] = e_feat[1:] != e_feat[:-1]
    group_id = np.cumsum(new_group) - 1
    group_first = np.flatnonzero(new_group)
    base_cnt = np.concatenate([[0], cum_cnt])[group_first]
    base_pay = np.concatenate([np.zeros((1, e_pay.shape[1]), dtype=e_pay.dtype), cum_pay])[group_first]
    left_cnt = cum_cnt - base_cnt[group_id]
    left_pay = cum_pay - base_pay[group_id]
    idx = np.flatnonzero(boundary)
    if len(idx) == 0:
        return None
    n_l = left_cnt[idx]
    n_r = n_node - n_l
    ok = (n_l >= min_leaf) & (n_r >= min_leaf)
    idx = idx[ok]
    if len(idx) == 0:
        return None
    return idx, thr[idx], left_cnt[idx], left_pay[idx]


def best_gini_split(fm: FeatureMatrix, node_rows: np.ndarray, onehot: np.ndarray,
                    class_counts: np.ndarray, min_leaf: int,
                    feature_subset: np.ndarray | None = None):
    """Exact minimum-weighted-Gini split, or None if no admissible candidate."""
    seg = _segments(fm, node_rows, onehot, feature_subset)
    if seg is None:
        return None
    e_feat, e_val, e_cnt, e_pay, n_node = seg
    cand = _candidates(e_feat, e_val, e_cnt, e_pay, n_node, min_leaf)
    if cand is None:
        return None
    idx, thr, n_l, counts_l = cand
    n_r = n_node - n_l
    counts_r = class_counts[None, :] - counts_l
    s_l = (counts_l.astype(np.int64) ** 2).sum(axis=1)
    s_r = (counts_r.astype(np.int64) ** 2).sum(axis=1)
    quality = s_l / n_l + s_r / n_r
    # exact rational comparison restricted to the float near-optimums
    shortlist = np.flatnonzero(quality >= quality.max() * (1.0 - 1e-9))
    best = None
    for j in shortlist:
        num = int(s_l[j]) * int(n_r[j]) + int(s_r[j]) * int(n_l[j])
        den = int(n_l[j]) * int(n_r[j])
        if best is None or num * best[1] > best[0] * den:
            best = (num, den, int(e_feat[idx[j]]), float(thr[j]))
    return best[2], best[3]


def best_variance_split(fm: FeatureMatrix, node_rows: np.ndarray, residuals: np.ndarray,
                        min_leaf: int, feature_subset: np.ndarray | None = None):
    """Max variance-reduction split on float residual sums, or None."""
    seg = _segments(fm, node_rows, residuals[:, None], feature_subset)
    if seg is None:
        return None
    e_feat, e_val, e_cnt, e_pay, n_node = seg
    cand = _candidates(e_feat, e_val, e_cnt, e_pay, n_node, min_leaf)
    if cand is None:
        return None
    idx, thr, n_l, sums_l = cand
    s_l = sums_l[:, 0]
    s_r = residuals.sum() - s_l
    n_r = n_node - n_l
    proxy = s_l * s_l / n_l + s_r * s_r / n_r
    j = int(np.argmax(proxy))  # first max = lowest (feature, threshold)
    return int(e_feat[idx[j]]), float(thr[j])


def build_classification_tree(fm: FeatureMatrix, labels: np.ndarray, n_classes: int,
                              node_rows: np.ndarray, max_depth: int | None,
                              min_leaf: int, feature_sampler=None,
                              depth: int = 0) -> TreeNode:
    counts = np.bincount(labels[node_rows], minlength=n_classes)
    n_node = len(node_rows)

    def leaf() -> TreeNode:
        return TreeNode(scores=counts / n_node)

    if counts.max() == n_node:
        return leaf()
    if max_depth is not None and depth >= max_depth:
        return leaf()
    if n_node < 2 * min_leaf:
        return leaf()
    subset = feature_sampler() if feature_sampler is not None else None
    onehot = np.zeros((n_node, n_classes), dtype=np.int64)
    onehot[np.arange(n_node), labels[node_rows]] = 1
    split = best_gini_split(fm, node_rows, onehot, counts, min_leaf, subset)
    if split is None:
        return leaf()
    feature, threshold = split
    values = fm.feature_values(node_rows, feature)
    left_mask = values <= threshold
    left = build_classification_tree(fm, labels, n_classes, node_rows[left_mask],
                                     max_depth, min_leaf, feature_sampler, depth + 1)
    right = build_classification_tree(fm, labels, n_classes, node_rows[~left_mask],
                                      max_depth, min_leaf, feature_sampler, depth + 1)
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right)


def build_regression_tree(fm: FeatureMatrix, residuals: np.ndarray,
                          node_rows: np.ndarray, max_depth: int | None,
                          min_leaf: int, leaf_value, train_values: np.ndarray,
                          depth: int = 0) -> TreeNode:
    """CART regression tree; leaf payload is [leaf_value(residual subset)].

    Leaf predictions for the training rows are written into train_values so
    boosting does not need to re-walk the tree it just built.
    """
    n_node = len(node_rows)

    def leaf() -> TreeNode:
        value = float(leaf_value(residuals[node_rows]))
        if not np.isfinite(value):
            raise DataError("non-finite leaf value in regression tree")
        train_values[node_rows] = value
        return TreeNode(scores=np.array([value]))

    if max_depth is not None and depth >= max_depth:
        return leaf()
    if n_node < 2 * min_leaf:
        return leaf()
    split = best_variance_split(fm, node_rows, residuals[node_rows], min_leaf)
    if split is None:
        return leaf()
    feature, threshold = split
    values = fm.feature_values(node_rows, feature)
    left_mask = values <= threshold
    left = build_regression_tree(fm, residuals, node_rows[left_mask], max_depth,
                                 min_leaf, leaf_value, train_values, depth + 1)
    right = build_regression_tree(fm, residuals, node_rows[~left_mask], max_depth,
                                  min_leaf, leaf_value, train_values, depth + 1)
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right)


def tree_apply(node: TreeNode, values: dict[int, float]) -> np.ndarray:
    """Walk a tree with one row's {feature: value} dict (zeros implicit)."""
    while not node.is_leaf:
        if values.get(node.feature, 0.0) <= node.threshold:
            node = node.left
        else:
            node = node.right
    return node.scores


class DecisionTree(BaseClassifier):
    """Greedy CART classifier; leaves emit class-frequency scores."""

    kind = "dtree"

    def __init__(self, max_depth: int | None = None, min_samples_leaf: int = 1):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def _fit(self, matrix: TrainingMatrix) -> None:
        if self.min_samples_leaf < 1:
            raise DataError("min_samples_leaf must be >= 1")
        fm = FeatureMatrix(matrix.rows)
        self.root_ = build_classification_tree(
            fm,
            matrix.label_array(),
            matrix.n_classes,
            np.arange(matrix.n, dtype=np.int64),
            self.max_depth,
            self.min_samples_leaf,
        )

    def predict_scores(self, rows: list[SparseVector]) -> np.ndarray:
        self.require_fitted()
        return np.stack([tree_apply(self.root_, row.to_dict()) for row in rows])

    def _predict_indices(self, rows) -> np.ndarray:
        return self.predict_scores(rows).argmax(axis=1)
