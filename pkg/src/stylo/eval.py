"""Evaluation: confusion matrices, accuracy, weighted/macro F1, ordinal MAE,
timing capture, and report serialization.

Conventions pinned here: any 0/0 in precision/recall/F1 is defined as 0;
macro F1 averages over every label in the label space, including labels that
never occur.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import LabelSpace
from .errors import DataError


@dataclass
class ConfusionMatrix:
    label_space: LabelSpace
    counts: list[list[int]]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class TimingRecord:
    phase: str
    wall_seconds: float


@dataclass
class EvaluationReport:
    accuracy: float
    weighted_f1: float
    macro_f1: float
    per_class: dict[str, ClassMetrics]
    confusion: ConfusionMatrix
    mae: float | None = None
    timings: dict[str, float] = field(default_factory=dict)


def confusion(y_true: list[str], y_pred: list[str], ls: LabelSpace) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise DataError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise DataError("cannot evaluate zero pairs")
    k = len(ls)
    counts = [[0] * k for _ in range(k)]
    for t, p in zip(y_true, y_pred):
        counts[ls.index(t)][ls.index(p)] += 1
    return ConfusionMatrix(label_space=ls, counts=counts)


def prf_per_class(cm: ConfusionMatrix) -> dict[str, ClassMetrics]:
    k = len(cm.label_space)
    out = {}
    for i, label in enumerate(cm.label_space.labels):
        tp = cm.counts[i][i]
        fp = sum(cm.counts[j][i] for j in range(k)) - tp
        fn = sum(cm.counts[i]) - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[label] = ClassMetrics(precision=precision, recall=recall, f1=f1,
                                  support=tp + fn)
    return out


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total < 1:
        raise DataError("empty confusion matrix")
    return sum(cm.counts[i][i] for i in range(len(cm.label_space))) / total


def weighted_f1(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total < 1:
        raise DataError("empty confusion matrix")
    per_class = prf_per_class(cm)
    return sum(m.support / total * m.f1 for m in per_class.values())


def macro_f1(cm: ConfusionMatrix) -> float:
    if cm.total < 1:
        raise DataError("empty confusion matrix")
    per_class = prf_per_class(cm)
    return sum(m.f1 for m in per_class.values()) / len(per_class)


def mae_ordinal(y_true: list[str], y_pred: list[str], ls: LabelSpace) -> float:
    if not ls.ordinal:
        raise DataError("MAE requires an ordinal label space")
    if len(y_true) != len(y_pred):
        raise DataError(f"length mismatch: {len(y_true)} true vs {len(y_pred)} predicted")
    if not y_true:
        raise DataError("cannot evaluate zero pairs")
    ranks = ls.ordinal_values
    for label in set(y_true) | set(y_pred):
        if label not in ranks:
            raise DataError(f"label {label!r} not in ordinal label space")
    return sum(abs(ranks[t] - ranks[p]) for t, p in zip(y_true, y_pred)) / len(y_true)


def evaluate(y_true: list[str], y_pred: list[str], ls: LabelSpace,
             timings: dict[str, float] | None = None) -> EvaluationReport:
    cm = confusion(y_true, y_pred, ls)
    return EvaluationReport(
        accuracy=accuracy(cm),
        weighted_f1=weighted_f1(cm),
        macro_f1=macro_f1(cm),
        per_class=prf_per_class(cm),
        confusion=cm,
        mae=mae_ordinal(y_true, y_pred, ls) if ls.ordinal else None,
        timings=dict(timings or {}),
    )


def time_phase(phase: str, thunk):
    """Run thunk, returning (result, TimingRecord) from a monotonic clock."""
    start = time.perf_counter()
    result = thunk()
    elapsed = time.perf_counter() - start
    return result, TimingRecord(phase=phase, wall_seconds=elapsed)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def report_to_json_dict(report: EvaluationReport) -> dict:
    return {
        "accuracy": report.accuracy,
        "weighted_f1": report.weighted_f1,
        "macro_f1": report.macro_f1,
        "mae": report.mae,
        "per_class": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for label, m in report.per_class.items()
        },
        "timing": {f"{phase}_seconds": secs for phase, secs in report.timings.items()},
        "confusion": {
            "labels": list(report.confusion.label_space.labels),
            "counts": report.confusion.counts,
        },
    }


def save_report_json(report: EvaluationReport, path: str | Path) -> None:
    payload = json.dumps(report_to_json_dict(report), indent=2, sort_keys=True)
    Path(path).write_text(payload + "\n", encoding="utf-8")


def save_report_text(report: EvaluationReport, path: str | Path) -> None:
    """Flat `key = value` rendering of the same report."""
    lines = [
        f"accuracy = {report.accuracy!r}",
        f"weighted_f1 = {report.weighted_f1!r}",
        f"macro_f1 = {report.macro_f1!r}",
    ]
    if report.mae is not None:
        lines.append(f"mae = {report.mae!r}")
    for label in report.confusion.label_space.labels:
        m = report.per_class[label]
        lines.append(f"per_class.{label}.precision = {m.precision!r}")
        lines.append(f"per_class.{label}.recall = {m.recall!r}")
        lines.append(f"per_class.{label}.f1 = {m.f1!r}")
        lines.append(f"per_class.{label}.support = {m.support}")
    for phase in sorted(report.timings):
        lines.append(f"timing.{phase}_seconds = {report.timings[phase]!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
