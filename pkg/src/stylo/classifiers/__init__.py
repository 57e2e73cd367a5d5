"""The eight model kinds behind one train/predict contract."""

from __future__ import annotations

from ..corpus import LabelSpace
from ..errors import ConfigError
from ..vectors import SparseVector
from .base import BaseClassifier, TrainingMatrix
from .baseline import MajorityClassifier
from .boosting import GradientBoosting
from .forest import RandomForest
from .knn import KNearestNeighbors
from .linear import LinearSVM, LogisticRegression
from .mlp import MLPClassifier
from .persist import load_model, persist_model
from .tree import DecisionTree

CLASSIFIER_KINDS: dict[str, type[BaseClassifier]] = {
    "majority": MajorityClassifier,
    "knn": KNearestNeighbors,
    "logreg": LogisticRegression,
    "linsvm": LinearSVM,
    "mlp": MLPClassifier,
    "dtree": DecisionTree,
    "rforest": RandomForest,
    "gboost": GradientBoosting,
}

# Column order and headers of the results tables.
TABLE_ORDER = ("majority", "knn", "logreg", "linsvm", "mlp", "dtree", "rforest", "gboost")
DISPLAY_NAMES = {
    "majority": "Majority",
    "knn": "KNN",
    "logreg": "LR",
    "linsvm": "LSVM",
    "mlp": "MLP",
    "dtree": "DT",
    "rforest": "RF",
    "gboost": "GB",
}


def make_classifier(kind: str, **params) -> BaseClassifier:
    cls = CLASSIFIER_KINDS.get(kind)
    if cls is None:
        raise ConfigError(
            f"unknown classifier kind {kind!r}; choose from {sorted(CLASSIFIER_KINDS)}"
        )
    return cls(**params)


def train(kind: str, rows: list[SparseVector], labels: list[str],
          label_space: LabelSpace | None = None, **params) -> BaseClassifier:
    return make_classifier(kind, **params).fit(rows, labels, label_space)


def predict(model: BaseClassifier, rows: list[SparseVector]) -> list[str]:
    """Uniform inference entry point; one label string per row."""
    return model.predict(rows)


__all__ = [
    "BaseClassifier",
    "TrainingMatrix",
    "MajorityClassifier",
    "KNearestNeighbors",
    "LogisticRegression",
    "LinearSVM",
    "MLPClassifier",
    "DecisionTree",
    "RandomForest",
    "GradientBoosting",
    "CLASSIFIER_KINDS",
    "TABLE_ORDER",
    "DISPLAY_NAMES",
    "make_classifier",
    "train",
    "predict",
    "persist_model",
    "load_model",
]
