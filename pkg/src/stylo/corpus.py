"""Labeled text datasets: loading, label spaces, deterministic splits.

File formats
------------
TSV: UTF-8, one header row, tab separated, ``\\n`` line endings, no quoting.
Tabs, newlines and backslashes inside the text field must be escaped by the
producer as the two-character sequences ``\\t``, ``\\n``, ``\\r``, ``\\\\``;
the loader reverses that escaping.

JSONL: one JSON object per line; field names are configurable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import DataError
from .rng import SplitMix64


@dataclass(frozen=True)
class Instance:
    """One labeled text record. ``label`` is None for unlabeled data."""

    id: str
    text: str
    label: str | None = None

    def __post_init__(self):
        if not self.id:
            raise DataError("instance id must be nonempty")
        if not self.text.strip():
            raise DataError(f"instance {self.id!r}: text is empty after trimming")


@dataclass(frozen=True)
class LabelSpace:
    """Ordered set of class labels, optionally with integer ordinal ranks."""

    labels: tuple[str, ...]
    ordinal: bool = False
    ordinal_values: dict[str, int] | None = None

    def __post_init__(self):
        if len(self.labels) < 2:
            raise DataError("label space needs at least 2 labels")
        if len(set(self.labels)) != len(self.labels):
            raise DataError("label space contains duplicate labels")
        if self.ordinal:
            if self.ordinal_values is None:
                raise DataError("ordinal label space requires ordinal_values")
            if set(self.ordinal_values) != set(self.labels):
                raise DataError("ordinal_values must map exactly the labels")
            ranks = list(self.ordinal_values.values())
            if len(set(ranks)) != len(ranks):
                raise DataError("ordinal ranks must be distinct")
        elif self.ordinal_values is not None:
            raise DataError("ordinal_values only allowed when ordinal=True")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DataError(f"label {label!r} not in label space {list(self.labels)}")

    def __len__(self) -> int:
        return len(self.labels)


@dataclass
class Dataset:
    instances: list[Instance]
    label_space: LabelSpace
    name: str = "dataset"

    def __post_init__(self):
        seen = set()
        for inst in self.instances:
            if inst.id in seen:
                raise DataError(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)
            if inst.label is not None and inst.label not in self.label_space.labels:
                raise DataError(
                    f"instance {inst.id!r}: label {inst.label!r} not in label space"
                )

    def __len__(self) -> int:
        return len(self.instances)

    def labels(self) -> list[str]:
        out = []
        for inst in self.instances:
            if inst.label is None:
                raise DataError(f"instance {inst.id!r} is unlabeled")
            out.append(inst.label)
        return out


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DataError("train_fraction must be in (0, 1)")


@dataclass(frozen=True)
class RecordSchema:
    """Names of the id/text/label columns or JSON fields.

    When ``headline`` is set, the instance text is the headline and body
    joined as "headline\\n\\nbody" (article-style records).
    """

    id: str = "id"
    text: str = "text"
    label: str | None = "label"
    headline: str | None = None


_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape_tsv_field(value: str) -> str:
    out = []
    for ch in value:
        out.append(_ESCAPES.get(ch, ch))
    return "".join(out)


def unescape_tsv_field(value: str, where: str = "") -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            if i + 1 >= len(value) or value[i + 1] not in _UNESCAPES:
                raise DataError(f"invalid escape sequence in TSV field{where}")
            out.append(_UNESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def load_dataset(
    path: str | Path,
    format: str = "tsv",
    schema: RecordSchema | None = None,
    label_space: LabelSpace | None = None,
    name: str | None = None,
) -> Dataset:
    """Load a Dataset from a TSV or JSONL file.

    The label space is inferred from distinct labels in order of first
    appearance unless an explicit ``label_space`` is given, in which case
    unknown labels are an error.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"dataset file not found: {path}")
    schema = schema or RecordSchema()
    if format == "tsv":
        records = _read_tsv(path, schema)
    elif format == "jsonl":
        records = _read_jsonl(path, schema)
    else:
        raise DataError(f"unknown dataset format {format!r}")

    if not records:
        raise DataError(f"{path}: no instances")

    instances = []
    seen_labels: list[str] = []
    for line_no, rec_id, text, label in records:
        if label is not None and label_space is not None:
            if label not in label_space.labels:
                raise DataError(
                    f"{path}:{line_no}: unknown label {label!r} for explicit label space"
                )
        if label is not None and label not in seen_labels:
            seen_labels.append(label)
        try:
            instances.append(Instance(id=rec_id, text=text, label=label))
        except DataError as e:
            raise DataError(f"{path}:{line_no}: {e}") from None

    if label_space is None:
        if len(seen_labels) < 2:
            raise DataError(
                f"{path}: found {len(seen_labels)} distinct label(s); need an explicit "
                "label space for datasets with fewer than 2"
            )
        label_space = LabelSpace(labels=tuple(seen_labels))

    try:
        return Dataset(instances=instances, label_space=label_space, name=name or path.stem)
    except DataError as e:
        raise DataError(f"{path}: {e}") from None


def _read_tsv(path: Path, schema: RecordSchema):
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise DataError(f"{path}: not valid UTF-8 ({e})") from None
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DataError(f"{path}: no instances")
    header = lines[0].split("\t")
    col = {name: i for i, name in enumerate(header)}
    for required in (schema.id, schema.text):
        if required not in col:
            raise DataError(f"{path}: missing column {required!r} in header {header}")
    label_idx = None
    if schema.label is not None:
        if schema.label not in col:
            raise DataError(f"{path}: missing column {schema.label!r} in header {header}")
        label_idx = col[schema.label]
    headline_idx = None
    if schema.headline is not None:
        if schema.headline not in col:
            raise DataError(f"{path}: missing column {schema.headline!r} in header {header}")
        headline_idx = col[schema.headline]

    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise DataError(
                f"{path}:{line_no}: expected {len(header)} columns, got {len(fields)}"
            )
        where = f" at {path}:{line_no}"
        rec_id = unescape_tsv_field(fields[col[schema.id]], where)
        text = unescape_tsv_field(fields[col[schema.text]], where)
        if headline_idx is not None:
            headline = unescape_tsv_field(fields[headline_idx], where)
            text = f"{headline}\n\n{text}"
        label = None
        if label_idx is not None:
            label = unescape_tsv_field(fields[label_idx], where) or None
        records.append((line_no, rec_id, text, label))
    return records


def _read_jsonl(path: Path, schema: RecordSchema):
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataError(f"{path}:{line_no}: invalid JSON ({e.msg})") from None
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{line_no}: expected a JSON object")
            for required in (schema.id, schema.text):
                if required not in obj:
                    raise DataError(f"{path}:{line_no}: missing field {required!r}")
            text = str(obj[schema.text])
            if schema.headline is not None:
                if schema.headline not in obj:
                    raise DataError(f"{path}:{line_no}: missing field {schema.headline!r}")
                text = f"{obj[schema.headline]}\n\n{text}"
            label = None
            if schema.label is not None and obj.get(schema.label) is not None:
                label = str(obj[schema.label])
            records.append((line_no, str(obj[schema.id]), text, label))
    return records


def save_dataset_tsv(dataset: Dataset, path: str | Path, schema: RecordSchema | None = None):
    """Write a Dataset in the TSV interchange format (inverse of load_dataset)."""
    schema = schema or RecordSchema()
    path = Path(path)
    cols = [schema.id, schema.text] + ([schema.label] if schema.label else [])
    lines = ["\t".join(cols)]
    for inst in dataset.instances:
        row = [escape_tsv_field(inst.id), escape_tsv_field(inst.text)]
        if schema.label:
            row.append(escape_tsv_field(inst.label or ""))
        lines.append("\t".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def train_test_split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Deterministic shuffle-and-cut split.

    Instance order is permuted by a Fisher-Yates shuffle driven by
    SplitMix64(seed); the first floor(train_fraction * N) permuted instances
    form the train side. Identical inputs give identical partitions on every
    platform.
    """
    n = len(dataset)
    if n < 2:
        raise DataError("need at least 2 instances to split")
    n_train = int(spec.train_fraction * n)
    if n_train == 0 or n_train == n:
        raise DataError(
            f"split of {n} instances at fraction {spec.train_fraction} leaves one side empty"
        )
    order = list(range(n))
    SplitMix64(spec.seed).shuffle(order)
    train = [dataset.instances[i] for i in order[:n_train]]
    test = [dataset.instances[i] for i in order[n_train:]]
    return (
        Dataset(train, dataset.label_space, name=f"{dataset.name}/train"),
        Dataset(test, dataset.label_space, name=f"{dataset.name}/test"),
    )


def class_distribution(dataset: Dataset) -> dict[str, tuple[int, Fraction]]:
    """Per-label (count, prevalence). Prevalences are exact rationals."""
    counts: dict[str, int] = {}
    for label in dataset.labels():
        counts[label] = counts.get(label, 0) + 1
    total = len(dataset)
    return {label: (c, Fraction(c, total)) for label, c in counts.items()}
