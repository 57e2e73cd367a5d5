"""Lenient dataset reading for the annotator.

Unlike the consumer toolkit, rows with empty text are kept here (they are
skipped later and listed in the .skipped file rather than rejected).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class SidecarError(Exception):
    pass


@dataclass(frozen=True)
class Record:
    id: str
    text: str


_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _unescape(value: str) -> str:
    out, i = [], 0
    while i < len(value):
        ch = value[i]
        if ch == "\\" and i + 1 < len(value) and value[i + 1] in _UNESCAPES:
            out.append(_UNESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def read_records(path: str | Path, format: str = "tsv", id_field: str = "id",
                 text_field: str = "text") -> list[Record]:
    path = Path(path)
    if not path.is_file():
        raise SidecarError(f"input file not found: {path}")
    if format == "tsv":
        records = _read_tsv(path, id_field, text_field)
    elif format == "jsonl":
        records = _read_jsonl(path, id_field, text_field)
    else:
        raise SidecarError(f"unknown format {format!r} (use tsv or jsonl)")
    seen = set()
    for rec in records:
        if rec.id in seen:
            raise SidecarError(f"{path}: duplicate instance id {rec.id!r}")
        seen.add(rec.id)
    return records


def _read_tsv(path: Path, id_field: str, text_field: str) -> list[Record]:
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SidecarError(f"{path}: empty file")
    header = lines[0].split("\t")
    try:
        id_col = header.index(id_field)
        text_col = header.index(text_field)
    except ValueError as e:
        raise SidecarError(f"{path}: {e}") from None
    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise SidecarError(
                f"{path}:{line_no}: expected {len(header)} columns, got {len(fields)}"
            )
        records.append(Record(id=_unescape(fields[id_col]), text=_unescape(fields[text_col])))
    return records


def _read_jsonl(path: Path, id_field: str, text_field: str) -> list[Record]:
    records = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SidecarError(f"{path}:{line_no}: invalid JSON ({e.msg})") from None
            if id_field not in obj or text_field not in obj:
                raise SidecarError(f"{path}:{line_no}: missing {id_field!r} or {text_field!r}")
            records.append(Record(id=str(obj[id_field]), text=str(obj[text_field])))
    return records
