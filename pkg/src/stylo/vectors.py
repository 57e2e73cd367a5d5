"""Sparse vector type shared by the feature pipeline and all classifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DataError


@dataclass(frozen=True)
class SparseVector:
    """Fixed-dimension vector stored as sorted (index, value) pairs.

    Invariants: strictly increasing indices below ``dimension``, no stored
    zeros, all values finite.
    """

    dimension: int
    entries: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.dimension < 0:
            raise DataError("dimension must be nonnegative")
        prev = -1
        for idx, val in self.entries:
            if not prev < idx < self.dimension:
                raise DataError(
                    f"index {idx} out of order or out of range for dimension {self.dimension}"
                )
            if val == 0.0:
                raise DataError(f"stored zero at index {idx}")
            if not math.isfinite(val):
                raise DataError(f"non-finite value at index {idx}")
            prev = idx

    @classmethod
    def from_dict(cls, dimension: int, values: dict[int, float]) -> "SparseVector":
        pairs = tuple(
            (idx, float(val)) for idx, val in sorted(values.items()) if val != 0.0
        )
        return cls(dimension=dimension, entries=pairs)

    @classmethod
    def from_dense(cls, values) -> "SparseVector":
        arr = np.asarray(values, dtype=np.float64)
        return cls.from_dict(arr.shape[0], {int(i): float(v) for i, v in enumerate(arr) if v != 0.0})

    def to_dict(self) -> dict[int, float]:
        return dict(self.entries)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension, dtype=np.float64)
        for idx, val in self.entries:
            out[idx] = val
        return out

    def norm(self) -> float:
        return math.sqrt(sum(v * v for _, v in self.entries))

    @property
    def nnz(self) -> int:
        return len(self.entries)


def concat(blocks: list[SparseVector]) -> SparseVector:
    """Concatenate vectors; block b's indices are shifted by the preceding dims."""
    entries = []
    offset = 0
    for block in blocks:
        entries.extend((offset + idx, val) for idx, val in block.entries)
        offset += block.dimension
    return SparseVector(dimension=offset, entries=tuple(entries))


def slice_block(vec: SparseVector, start: int, dim: int) -> SparseVector:
    """Restrict a concatenated vector to one block's offset range."""
    entries = tuple(
        (idx - start, val) for idx, val in vec.entries if start <= idx < start + dim
    )
    return SparseVector(dimension=dim, entries=entries)


def to_csr(rows: list[SparseVector]) -> sp.csr_matrix:
    """Pack rows (equal dimension) into a scipy CSR matrix."""
    if not rows:
        raise DataError("cannot build a matrix from zero rows")
    dim = rows[0].dimension
    for i, row in enumerate(rows):
        if row.dimension != dim:
            raise DataError(f"row {i} has dimension {row.dimension}, expected {dim}")
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    nnz = sum(r.nnz for r in rows)
    indices = np.empty(nnz, dtype=np.int32)
    data = np.empty(nnz, dtype=np.float64)
    pos = 0
    for i, row in enumerate(rows):
        for idx, val in row.entries:
            indices[pos] = idx
            data[pos] = val
            pos += 1
        indptr[i + 1] = pos
    return sp.csr_matrix((data, indices, indptr), shape=(len(rows), dim))
