"""Feature extraction: vocabularies, count/TF-IDF vectorization, embedding
loading, and the block-concatenating pipeline.

The pipeline is fit on training data only and is immutable afterwards.
Enabled blocks are laid out in the fixed order word_bow, word_tfidf,
char_bow, pos_bow, morph, embedding; each block owns a contiguous index
range of the concatenated vector.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from ._binio import Reader as _Reader
from ._binio import pack_str as _pack_str
from .annotate import (
    AnnotatedSentence,
    NgramMultiset,
    char_ngrams,
    morph_feature_counts,
    pos_ngrams,
    tokenize,
    word_counts,
)
from .corpus import Dataset, Instance
from .errors import DataError
from .vectors import SparseVector, concat

BLOCK_ORDER = ("word_bow", "word_tfidf", "char_bow", "pos_bow", "morph", "embedding")


@dataclass
class Vocabulary:
    """Dense symbol -> index map plus the document frequencies behind it."""

    symbols: list[str]
    document_frequency: list[int]
    n_documents: int
    frozen: bool = True

    def __post_init__(self):
        self.index: dict[str, int] = {s: i for i, s in enumerate(self.symbols)}
        if len(self.index) != len(self.symbols):
            raise DataError("vocabulary symbols must be distinct")
        for df in self.document_frequency:
            if not 1 <= df <= self.n_documents:
                raise DataError("document frequency out of range")

    def __len__(self) -> int:
        return len(self.symbols)


def fit_vocabulary(
    corpus: list[NgramMultiset],
    min_df: int = 1,
    max_features: int | None = None,
) -> Vocabulary:
    """Fit a vocabulary over symbol multisets.

    Symbols occurring in fewer than ``min_df`` documents are dropped. With
    ``max_features`` set, the top symbols by total count survive (count ties
    broken toward the lexicographically smaller symbol). Index assignment is
    by lexicographic symbol order, so vocabularies are platform independent.
    """
    if not corpus:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    if max_features is not None and max_features < 1:
        raise DataError("max_features must be at least 1")
    df: dict[str, int] = {}
    totals: dict[str, int] = {}
    for doc in corpus:
        for sym, cnt in doc.entries.items():
            df[sym] = df.get(sym, 0) + 1
            totals[sym] = totals.get(sym, 0) + cnt
    kept = [s for s, d in df.items() if d >= min_df]
    if not kept:
        raise DataError(f"no symbols left after min_df={min_df} filtering")
    if max_features is not None and len(kept) > max_features:
        kept.sort(key=lambda s: (-totals[s], s))
        kept = kept[:max_features]
    kept.sort()
    return Vocabulary(
        symbols=kept,
        document_frequency=[df[s] for s in kept],
        n_documents=len(corpus),
    )


def vectorize_counts(multiset: NgramMultiset, vocab: Vocabulary) -> SparseVector:
    """Counts of in-vocabulary symbols; out-of-vocabulary symbols are dropped."""
    if not vocab.frozen:
        raise DataError("vocabulary must be frozen before vectorizing")
    values = {}
    for sym, cnt in multiset.entries.items():
        idx = vocab.index.get(sym)
        if idx is not None:
            values[idx] = float(cnt)
    return SparseVector.from_dict(len(vocab), values)


@dataclass
class IdfWeights:
    dimension: int
    idf: np.ndarray

    def __post_init__(self):
        self.idf = np.asarray(self.idf, dtype=np.float64)
        if self.idf.shape != (self.dimension,):
            raise DataError("idf length must equal dimension")


def fit_idf(vocab: Vocabulary) -> IdfWeights:
    """Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1."""
    n = vocab.n_documents
    idf = np.array(
        [math.log((1.0 + n) / (1.0 + df)) + 1.0 for df in vocab.document_frequency],
        dtype=np.float64,
    )
    return IdfWeights(dimension=len(vocab), idf=idf)


def transform_tfidf(counts: SparseVector, weights: IdfWeights) -> SparseVector:
    """Apply idf weights to raw counts, then L2-normalize; zeros stay zero."""
    if counts.dimension != weights.dimension:
        raise DataError(
            f"dimension mismatch: counts {counts.dimension}, idf {weights.dimension}"
        )
    weighted = [(idx, val * weights.idf[idx]) for idx, val in counts.entries]
    norm = math.sqrt(sum(v * v for _, v in weighted))
    if norm == 0.0:
        return SparseVector(dimension=counts.dimension)
    return SparseVector(
        dimension=counts.dimension,
        entries=tuple((idx, v / norm) for idx, v in weighted),
    )


# --------------------------------------------------------------------------
# Dense embedding interchange
# --------------------------------------------------------------------------


def load_embeddings(path: str | Path, expected_dim: int) -> dict[str, np.ndarray]:
    """Read the embedding interchange file: `dim=<D>` header, then
    `<id>\\t<v1> <v2> ...` rows."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"embedding file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("dim="):
            raise DataError(f"{path}: first line must be dim=<D>, got {header!r}")
        try:
            dim = int(header[4:])
        except ValueError:
            raise DataError(f"{path}: invalid dimension in header {header!r}") from None
        if dim != expected_dim:
            raise DataError(f"{path}: header dim={dim}, expected {expected_dim}")
        out: dict[str, np.ndarray] = {}
        for row_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            rec_id, sep, rest = line.partition("\t")
            if not sep:
                raise DataError(f"{path}: missing tab separator at row {row_no}")
            if rec_id in out:
                raise DataError(f"{path}: duplicate id {rec_id!r} at row {row_no}")
            parts = rest.split(" ")
            if len(parts) != dim:
                raise DataError(f"{path}: dimension mismatch at row {row_no}")
            try:
                vec = np.array([float(p) for p in parts], dtype=np.float64)
            except ValueError:
                raise DataError(f"{path}: invalid float at row {row_no}") from None
            if not np.all(np.isfinite(vec)):
                raise DataError(f"{path}: non-finite value at row {row_no}")
            out[rec_id] = vec
    return out


def save_embeddings(path: str | Path, embeddings: dict[str, np.ndarray], dim: int) -> None:
    """Inverse of load_embeddings; floats use shortest round-trip decimals."""
    lines = [f"dim={dim}"]
    for rec_id, vec in embeddings.items():
        if len(vec) != dim:
            raise DataError(f"embedding for {rec_id!r} has length {len(vec)}, expected {dim}")
        lines.append(rec_id + "\t" + " ".join(repr(float(v)) for v in vec))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# Pipeline configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockConfig:
    """Options for one bag-of-symbols block.

    ``sublinear_tf`` (word_tfidf only) replaces the raw term frequency
    with 1 + ln(tf) before idf weighting; raw counts are the default.
    """

    min_df: int = 1
    max_features: int | None = None
    n_min: int = 1
    n_max: int = 4
    sublinear_tf: bool = False

    def __post_init__(self):
        if self.min_df < 1:
            raise DataError("min_df must be >= 1")
        if not 1 <= self.n_min <= self.n_max <= 4:
            raise DataError("n-gram range must satisfy 1 <= n_min <= n_max <= 4")


@dataclass(frozen=True)
class EmbeddingBlockConfig:
    dim: int
    path: str | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise DataError("embedding dimension must be positive")


@dataclass(frozen=True)
class PipelineConfig:
    word_bow: BlockConfig | None = None
    word_tfidf: BlockConfig | None = None
    char_bow: BlockConfig | None = None
    pos_bow: BlockConfig | None = None
    morph: BlockConfig | None = None
    embedding: EmbeddingBlockConfig | None = None

    def __post_init__(self):
        if not self.enabled_blocks():
            raise DataError("at least one feature block must be enabled")

    def enabled_blocks(self) -> list[str]:
        return [name for name in BLOCK_ORDER if getattr(self, name) is not None]


def default_config() -> PipelineConfig:
    return PipelineConfig(
        word_bow=BlockConfig(n_min=1, n_max=1),
        word_tfidf=BlockConfig(n_min=1, n_max=1),
        char_bow=BlockConfig(n_min=1, n_max=4),
        pos_bow=BlockConfig(n_min=1, n_max=4),
    )


# --------------------------------------------------------------------------
# The fitted pipeline
# --------------------------------------------------------------------------

Annotations = dict[str, list[AnnotatedSentence]]
Embeddings = dict[str, np.ndarray]

_STD_FLOOR = 1e-8


class FeaturePipeline(BaseEstimator):
    """Fit vocabularies on a training Dataset, then transform instances into
    concatenated sparse vectors.

    ``annotations`` maps instance id -> list of AnnotatedSentence (required
    when pos_bow or morph is enabled); ``embeddings`` maps instance id ->
    dense vector (required when the embedding block is enabled). The
    embedding block is standardized per dimension with the training mean and
    stddev so dense values do not dominate count features.
    """

    def __init__(self, config: PipelineConfig | None = None):
        self.config = config

    def _cfg(self) -> PipelineConfig:
        return self.config if self.config is not None else default_config()

    # -- fitting ------------------------------------------------------------

    def fit(self, dataset: Dataset, annotations: Annotations | None = None,
            embeddings: Embeddings | None = None) -> "FeaturePipeline":
        cfg = self._cfg()
        self._check_coverage(cfg, dataset, annotations, embeddings)
        self.vocabularies_: dict[str, Vocabulary] = {}
        self.idf_: IdfWeights | None = None
        self.offsets_: dict[str, tuple[int, int]] = {}
        offset = 0
        for name in cfg.enabled_blocks():
            if name == "embedding":
                emb_cfg = cfg.embedding
                train_vecs = np.stack([embeddings[inst.id] for inst in dataset.instances])
                if train_vecs.shape[1] != emb_cfg.dim:
                    raise DataError(
                        f"embedding dim {train_vecs.shape[1]} != configured {emb_cfg.dim}"
                    )
                self.embed_mean_ = train_vecs.mean(axis=0)
                std = train_vecs.std(axis=0)
                self.embed_std_ = np.maximum(std, _STD_FLOOR)
                dim = emb_cfg.dim
            else:
                docs = [
                    self._block_multiset(name, inst, annotations) for inst in dataset.instances
                ]
                block_cfg = getattr(cfg, name)
                vocab = fit_vocabulary(docs, block_cfg.min_df, block_cfg.max_features)
                self.vocabularies_[name] = vocab
                if name == "word_tfidf":
                    self.idf_ = fit_idf(vocab)
                dim = len(vocab)
            self.offsets_[name] = (offset, dim)
            offset += dim
        self.total_dimension_ = offset
        return self

    def _check_coverage(self, cfg, dataset, annotations, embeddings):
        needs_annotations = cfg.pos_bow is not None or cfg.morph is not None
        if needs_annotations:
            if annotations is None:
                raise DataError("pos_bow/morph blocks need annotations")
            missing = [i.id for i in dataset.instances if i.id not in annotations]
            if missing:
                raise DataError(f"missing annotations for ids: {', '.join(missing[:10])}")
        if cfg.embedding is not None:
            if embeddings is None:
                raise DataError("embedding block needs an embeddings map")
            missing = [i.id for i in dataset.instances if i.id not in embeddings]
            if missing:
                raise DataError(f"missing embeddings for ids: {', '.join(missing[:10])}")

    def _block_multiset(self, name: str, instance: Instance,
                        annotations: Annotations | None) -> NgramMultiset:
        cfg = self._cfg()
        if name in ("word_bow", "word_tfidf"):
            return word_counts(tokenize(instance.text))
        if name == "char_bow":
            block = cfg.char_bow
            return char_ngrams(instance.text, block.n_min, block.n_max)
        if name == "pos_bow":
            block = cfg.pos_bow
            out = NgramMultiset()
            for sent in annotations[instance.id]:
                out.merge(pos_ngrams(sent, block.n_min, block.n_max))
            return out
        if name == "morph":
            out = NgramMultiset()
            for sent in annotations[instance.id]:
                out.merge(morph_feature_counts(sent))
            return out
        raise DataError(f"unknown block {name!r}")

    # -- transforming ---------------------------------------------------------

    def transform_one(self, instance: Instance, annotations: Annotations | None = None,
                      embeddings: Embeddings | None = None) -> SparseVector:
        self._require_fitted()
        cfg = self._cfg()
        blocks: list[SparseVector] = []
        for name in cfg.enabled_blocks():
            if name == "embedding":
                if embeddings is None or instance.id not in embeddings:
                    raise DataError(f"missing embedding for id {instance.id!r}")
                vec = np.asarray(embeddings[instance.id], dtype=np.float64)
                if vec.shape[0] != cfg.embedding.dim:
                    raise DataError(
                        f"embedding for {instance.id!r} has dim {vec.shape[0]}, "
                        f"expected {cfg.embedding.dim}"
                    )
                standardized = (vec - self.embed_mean_) / self.embed_std_
                blocks.append(SparseVector.from_dense(standardized))
                continue
            if name in ("pos_bow", "morph") and (
                annotations is None or instance.id not in annotations
            ):
                raise DataError(f"missing annotations for id {instance.id!r}")
            multiset = self._block_multiset(name, instance, annotations)
            counts = vectorize_counts(multiset, self.vocabularies_[name])
            if name == "word_tfidf":
                if cfg.word_tfidf.sublinear_tf:
                    counts = SparseVector(
                        counts.dimension,
                        tuple((i, 1.0 + math.log(v)) for i, v in counts.entries),
                    )
                counts = transform_tfidf(counts, self.idf_)
            blocks.append(counts)
        return concat(blocks)

    def transform(self, dataset: Dataset, annotations: Annotations | None = None,
                  embeddings: Embeddings | None = None) -> list[SparseVector]:
        return [self.transform_one(inst, annotations, embeddings) for inst in dataset.instances]

    def _require_fitted(self):
        if not hasattr(self, "total_dimension_"):
            raise DataError("pipeline is not fitted")

    # -- persistence ----------------------------------------------------------

    MAGIC = b"STYLOPIPE1"
    VERSION = 1

    def save(self, path: str | Path) -> None:
        """Binary layout documented in docs/formats.md."""
        self._require_fitted()
        cfg = self._cfg()
        buf = bytearray()
        buf += self.MAGIC
        buf += struct.pack("<BB", self.VERSION, len(cfg.enabled_blocks()))
        for name in cfg.enabled_blocks():
            start, dim = self.offsets_[name]
            buf += _pack_str(name)
            buf += struct.pack("<II", start, dim)
            if name == "embedding":
                buf += struct.pack("<B", 2)
                buf += struct.pack(f"<{dim}d", *self.embed_mean_)
                buf += struct.pack(f"<{dim}d", *self.embed_std_)
            else:
                block_cfg = getattr(cfg, name)
                kind = 1 if name == "word_tfidf" else 0
                buf += struct.pack("<B", kind)
                buf += struct.pack("<BBIBB", block_cfg.n_min, block_cfg.n_max,
                                   block_cfg.min_df,
                                   1 if block_cfg.sublinear_tf else 0,
                                   1 if block_cfg.max_features is not None else 0)
                if block_cfg.max_features is not None:
                    buf += struct.pack("<I", block_cfg.max_features)
                vocab = self.vocabularies_[name]
                buf += struct.pack("<II", vocab.n_documents, len(vocab))
                for sym, df in zip(vocab.symbols, vocab.document_frequency):
                    buf += _pack_str(sym)
                    buf += struct.pack("<I", df)
                if kind == 1:
                    buf += struct.pack(f"<{len(vocab)}d", *self.idf_.idf)
        buf += struct.pack("<I", self.total_dimension_)
        Path(path).write_bytes(bytes(buf))

    @classmethod
    def load(cls, path: str | Path) -> "FeaturePipeline":
        data = Path(path).read_bytes()
        reader = _Reader(data, str(path))
        if reader.take(len(cls.MAGIC)) != cls.MAGIC:
            raise DataError(f"{path}: not a pipeline file (bad magic)")
        version, n_blocks = reader.unpack("<BB")
        if version != cls.VERSION:
            raise DataError(f"{path}: unsupported pipeline version {version} (supported: {cls.VERSION})")
        block_kwargs: dict[str, object] = {}
        pipe = cls.__new__(cls)
        pipe.vocabularies_ = {}
        pipe.idf_ = None
        pipe.offsets_ = {}
        for _ in range(n_blocks):
            name = reader.unpack_str()
            start, dim = reader.unpack("<II")
            (kind,) = reader.unpack("<B")
            pipe.offsets_[name] = (start, dim)
            if kind == 2:
                mean = np.array(reader.unpack(f"<{dim}d"))
                std = np.array(reader.unpack(f"<{dim}d"))
                pipe.embed_mean_ = mean
                pipe.embed_std_ = std
                block_kwargs[name] = EmbeddingBlockConfig(dim=dim)
            else:
                n_min, n_max, min_df, sublinear, has_cap = reader.unpack("<BBIBB")
                max_features = None
                if has_cap:
                    (max_features,) = reader.unpack("<I")
                n_documents, v_size = reader.unpack("<II")
                symbols, dfs = [], []
                for _ in range(v_size):
                    symbols.append(reader.unpack_str())
                    (df,) = reader.unpack("<I")
                    dfs.append(df)
                vocab = Vocabulary(symbols=symbols, document_frequency=dfs,
                                   n_documents=n_documents)
                pipe.vocabularies_[name] = vocab
                if kind == 1:
                    idf = np.array(reader.unpack(f"<{v_size}d"))
                    pipe.idf_ = IdfWeights(dimension=v_size, idf=idf)
                block_kwargs[name] = BlockConfig(
                    min_df=min_df, max_features=max_features, n_min=n_min, n_max=n_max,
                    sublinear_tf=bool(sublinear),
                )
        (total,) = reader.unpack("<I")
        reader.expect_end()
        pipe.total_dimension_ = total
        pipe.config = PipelineConfig(**block_kwargs)
        return pipe


