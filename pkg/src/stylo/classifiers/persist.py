"""Versioned binary persistence for all eight model kinds.

Layout (all integers and doubles little-endian; see docs/formats.md):

    magic "STYLOMDL1" | version u8 | kind (len-prefixed str)
    label space: n_labels u16, labels (str each), ordinal u8,
                 [ranks i32 x n_labels if ordinal]
    feature_dimension u32 | training_time f64 | kind payload

Trees are serialized preorder: tag u8 (0 leaf / 1 split); leaves carry
their score vector, splits carry feature u32 + threshold f64 followed by
the left then right subtree.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .._binio import Reader, pack_str
from ..corpus import LabelSpace
from ..errors import DataError
from .base import BaseClassifier
from .baseline import MajorityClassifier
from .boosting import GradientBoosting
from .forest import RandomForest
from .knn import KNearestNeighbors
from .linear import LinearSVM, LogisticRegression
from .mlp import MLPClassifier
from .tree import DecisionTree, TreeNode

MAGIC = b"STYLOMDL1"
VERSION = 1


def _pack_floats(arr) -> bytes:
    flat = np.ascontiguousarray(arr, dtype="<f8")
    return struct.pack("<Q", flat.size) + flat.tobytes()


def _read_floats(reader: Reader, shape=None) -> np.ndarray:
    (count,) = reader.unpack("<Q")
    arr = np.frombuffer(reader.take(8 * count), dtype="<f8").copy()
    return arr.reshape(shape) if shape is not None else arr


def _pack_tree(node: TreeNode) -> bytes:
    if node.is_leaf:
        return struct.pack("<B", 0) + _pack_floats(node.scores)
    return (
        struct.pack("<BId", 1, node.feature, node.threshold)
        + _pack_tree(node.left)
        + _pack_tree(node.right)
    )


def _read_tree(reader: Reader) -> TreeNode:
    (tag,) = reader.unpack("<B")
    if tag == 0:
        return TreeNode(scores=_read_floats(reader))
    if tag != 1:
        raise DataError(f"{reader.origin}: corrupt tree node tag {tag}")
    feature, threshold = reader.unpack("<Id")
    left = _read_tree(reader)
    right = _read_tree(reader)
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right)


def _pack_label_space(ls: LabelSpace) -> bytes:
    out = struct.pack("<H", len(ls.labels))
    for label in ls.labels:
        out += pack_str(label)
    out += struct.pack("<B", 1 if ls.ordinal else 0)
    if ls.ordinal:
        out += struct.pack(f"<{len(ls.labels)}i", *(ls.ordinal_values[l] for l in ls.labels))
    return out


def _read_label_space(reader: Reader) -> LabelSpace:
    (n,) = reader.unpack("<H")
    labels = tuple(reader.unpack_str() for _ in range(n))
    (ordinal,) = reader.unpack("<B")
    ranks = None
    if ordinal:
        values = reader.unpack(f"<{n}i")
        ranks = dict(zip(labels, values))
    return LabelSpace(labels=labels, ordinal=bool(ordinal), ordinal_values=ranks)


def persist_model(model: BaseClassifier, path: str | Path) -> None:
    model.require_fitted()
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<B", VERSION)
    buf += pack_str(model.kind)
    buf += _pack_label_space(model.label_space_)
    buf += struct.pack("<Id", model.feature_dimension_, model.training_time_)
    packer = _PACKERS.get(model.kind)
    if packer is None:
        raise DataError(f"cannot persist model kind {model.kind!r}")
    buf += packer(model)
    Path(path).write_bytes(bytes(buf))


def load_model(path: str | Path) -> BaseClassifier:
    data = Path(path).read_bytes()
    reader = Reader(data, str(path))
    if reader.take(len(MAGIC)) != MAGIC:
        raise DataError(f"{path}: not a model file")
    (version,) = reader.unpack("<B")
    if version != VERSION:
        raise DataError(f"{path}: unsupported model version {version} (supported: {VERSION})")
    kind = reader.unpack_str()
    label_space = _read_label_space(reader)
    feature_dimension, training_time = reader.unpack("<Id")
    unpacker = _UNPACKERS.get(kind)
    if unpacker is None:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    model = unpacker(reader, feature_dimension)
    model.label_space_ = label_space
    model.classes_ = label_space.labels
    model.feature_dimension_ = feature_dimension
    model.training_time_ = training_time
    reader.expect_end()
    return model


# -- per-kind payloads -------------------------------------------------------


def _pack_majority(m: MajorityClassifier) -> bytes:
    return struct.pack("<I", m.majority_index_)


def _unpack_majority(reader: Reader, feature_dimension: int) -> MajorityClassifier:
    m = MajorityClassifier()
    (m.majority_index_,) = reader.unpack("<I")
    return m


def _pack_knn(m: KNearestNeighbors) -> bytes:
    csr = m.train_matrix_
    out = struct.pack("<III", m.k, csr.shape[0], m.n_classes_)
    out += struct.pack(f"<{csr.shape[0]}I", *m.train_labels_)
    out += struct.pack("<Q", csr.nnz)
    out += np.ascontiguousarray(csr.indptr, dtype="<u8").tobytes()
    out += np.ascontiguousarray(csr.indices, dtype="<u4").tobytes()
    out += np.ascontiguousarray(csr.data, dtype="<f8").tobytes()
    return out


def _unpack_knn(reader: Reader, feature_dimension: int) -> KNearestNeighbors:
    k, n_rows, n_classes = reader.unpack("<III")
    m = KNearestNeighbors(k=k)
    m.train_labels_ = np.array(reader.unpack(f"<{n_rows}I"), dtype=np.int64)
    (nnz,) = reader.unpack("<Q")
    indptr = np.frombuffer(reader.take(8 * (n_rows + 1)), dtype="<u8").astype(np.int64)
    indices = np.frombuffer(reader.take(4 * nnz), dtype="<u4").astype(np.int32)
    data = np.frombuffer(reader.take(8 * nnz), dtype="<f8").copy()
    m.n_classes_ = n_classes
    m.train_matrix_ = sp.csr_matrix((data, indices, indptr),
                                    shape=(n_rows, feature_dimension))
    m.train_sq_norms_ = np.asarray(
        m.train_matrix_.multiply(m.train_matrix_).sum(axis=1)
    ).ravel()
    return m


def _pack_logreg(m: LogisticRegression) -> bytes:
    out = struct.pack("<dId", m.l2, m.epochs, m.lr)
    out += struct.pack("<II", *m.weights_.shape)
    out += _pack_floats(m.weights_)
    out += _pack_floats(m.bias_)
    return out


def _unpack_logreg(reader: Reader, feature_dimension: int) -> LogisticRegression:
    l2, epochs, lr = reader.unpack("<dId")
    d, k = reader.unpack("<II")
    m = LogisticRegression(l2=l2, epochs=epochs, lr=lr)
    m.weights_ = _read_floats(reader, (d, k))
    m.bias_ = _read_floats(reader)
    return m


def _pack_linsvm(m: LinearSVM) -> bytes:
    out = struct.pack("<dI", m.C, m.epochs)
    out += struct.pack("<II", *m.weights_.shape)
    out += _pack_floats(m.weights_)
    return out


def _unpack_linsvm(reader: Reader, feature_dimension: int) -> LinearSVM:
    C, epochs = reader.unpack("<dI")
    k, d = reader.unpack("<II")
    m = LinearSVM(C=C, epochs=epochs)
    m.weights_ = _read_floats(reader, (k, d))
    return m


def _pack_mlp(m: MLPClassifier) -> bytes:
    out = struct.pack("<IIdQ", m.hidden, m.epochs, m.lr, m.seed)
    out += struct.pack("<II", *m.w1_.shape)
    out += _pack_floats(m.w1_)
    out += _pack_floats(m.b1_)
    out += struct.pack("<II", *m.w2_.shape)
    out += _pack_floats(m.w2_)
    out += _pack_floats(m.b2_)
    return out


def _unpack_mlp(reader: Reader, feature_dimension: int) -> MLPClassifier:
    hidden, epochs, lr, seed = reader.unpack("<IIdQ")
    m = MLPClassifier(hidden=hidden, epochs=epochs, lr=lr, seed=seed)
    d, h = reader.unpack("<II")
    m.w1_ = _read_floats(reader, (d, h))
    m.b1_ = _read_floats(reader)
    h2, k = reader.unpack("<II")
    m.w2_ = _read_floats(reader, (h2, k))
    m.b2_ = _read_floats(reader)
    return m


def _pack_dtree(m: DecisionTree) -> bytes:
    depth = 0xFFFFFFFF if m.max_depth is None else m.max_depth
    return struct.pack("<II", depth, m.min_samples_leaf) + _pack_tree(m.root_)


def _unpack_dtree(reader: Reader, feature_dimension: int) -> DecisionTree:
    depth, min_leaf = reader.unpack("<II")
    m = DecisionTree(max_depth=None if depth == 0xFFFFFFFF else depth,
                     min_samples_leaf=min_leaf)
    m.root_ = _read_tree(reader)
    return m


def _pack_rforest(m: RandomForest) -> bytes:
    depth = 0xFFFFFFFF if m.max_depth is None else m.max_depth
    if m.max_features is None:
        mf_tag, mf_val = 0, 0
    elif m.max_features == "sqrt":
        mf_tag, mf_val = 1, 0
    else:
        mf_tag, mf_val = 2, int(m.max_features)
    out = struct.pack("<IQBBIII", m.n_trees, m.seed, 1 if m.bootstrap else 0,
                      mf_tag, mf_val, depth, m.min_samples_leaf)
    out += struct.pack("<I", m.n_classes_)
    for tree in m.trees_:
        out += _pack_tree(tree)
    return out


def _unpack_rforest(reader: Reader, feature_dimension: int) -> RandomForest:
    n_trees, seed, bootstrap, mf_tag, mf_val, depth, min_leaf = reader.unpack("<IQBBIII")
    max_features = {0: None, 1: "sqrt", 2: mf_val}[mf_tag]
    m = RandomForest(n_trees=n_trees, seed=seed, bootstrap=bool(bootstrap),
                     max_features=max_features,
                     max_depth=None if depth == 0xFFFFFFFF else depth,
                     min_samples_leaf=min_leaf)
    (m.n_classes_,) = reader.unpack("<I")
    m.trees_ = [_read_tree(reader) for _ in range(n_trees)]
    return m


def _pack_gboost(m: GradientBoosting) -> bytes:
    out = struct.pack("<IdII", m.n_stages, m.learning_rate, m.max_depth,
                      m.min_samples_leaf)
    out += _pack_floats(m.log_priors_)
    for stage_trees in m.stages_:
        for tree in stage_trees:
            out += _pack_tree(tree)
    return out


def _unpack_gboost(reader: Reader, feature_dimension: int) -> GradientBoosting:
    n_stages, lr, depth, min_leaf = reader.unpack("<IdII")
    m = GradientBoosting(n_stages=n_stages, learning_rate=lr, max_depth=depth,
                         min_samples_leaf=min_leaf)
    m.log_priors_ = _read_floats(reader)
    k = len(m.log_priors_)
    m.stages_ = [[_read_tree(reader) for _ in range(k)] for _ in range(n_stages)]
    return m


_PACKERS = {
    "majority": _pack_majority,
    "knn": _pack_knn,
    "logreg": _pack_logreg,
    "linsvm": _pack_linsvm,
    "mlp": _pack_mlp,
    "dtree": _pack_dtree,
    "rforest": _pack_rforest,
    "gboost": _pack_gboost,
}

_UNPACKERS = {
    "majority": _unpack_majority,
    "knn": _unpack_knn,
    "logreg": _unpack_logreg,
    "linsvm": _unpack_linsvm,
    "mlp": _unpack_mlp,
    "dtree": _unpack_dtree,
    "rforest": _unpack_rforest,
    "gboost": _unpack_gboost,
}
