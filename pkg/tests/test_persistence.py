import pytest

from conftest import random_sparse_rows
from stylo.classifiers import load_model, persist_model, predict, train
from stylo.corpus import LabelSpace
from stylo.errors import DataError
from stylo.rng import SplitMix64

AB = LabelSpace(labels=("A", "B"))
ORDINAL = LabelSpace(labels=("left", "center", "right"), ordinal=True,
                     ordinal_values={"left": 0, "center": 1, "right": 2})

KINDS = {
    "majority": {},
    "knn": {"k": 3},
    "logreg": {"epochs": 25},
    "linsvm": {"epochs": 25},
    "mlp": {"hidden": 5, "epochs": 25, "seed": 2},
    "dtree": {"max_depth": 4},
    "rforest": {"n_trees": 6, "seed": 2},
    "gboost": {"n_stages": 4},
}


@pytest.fixture(scope="module")
def fitted():
    rng = SplitMix64(811)
    rows = random_sparse_rows(11, 40, 7)
    labels = [AB.labels[rng.next_below(2)] for _ in range(40)]
    return {kind: train(kind, rows, labels, AB, **params) for kind, params in KINDS.items()}


@pytest.mark.parametrize("kind", list(KINDS))
def test_round_trip_identical_predictions(kind, fitted, tmp_path):
    model = fitted[kind]
    queries = random_sparse_rows(12, 50, 7)
    path = tmp_path / f"{kind}.bin"
    persist_model(model, path)
    loaded = load_model(path)
    assert loaded.kind == kind
    assert predict(loaded, queries) == predict(model, queries)
    assert loaded.feature_dimension_ == model.feature_dimension_
    assert loaded.classes_ == model.classes_
    assert loaded.training_time_ == model.training_time_


def test_ordinal_label_space_round_trips(tmp_path):
    rng = SplitMix64(812)
    rows = random_sparse_rows(13, 30, 4)
    labels = [ORDINAL.labels[rng.next_below(3)] for _ in range(30)]
    model = train("dtree", rows, labels, ORDINAL)
    path = tmp_path / "m.bin"
    persist_model(model, path)
    loaded = load_model(path)
    assert loaded.label_space_.ordinal
    assert loaded.label_space_.ordinal_values == ORDINAL.ordinal_values


def test_corrupt_magic(tmp_path, fitted):
    path = tmp_path / "m.bin"
    persist_model(fitted["majority"], path)
    raw = bytearray(path.read_bytes())
    raw[:9] = b"NOTMODEL!"
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(raw))
    with pytest.raises(DataError, match="not a model file"):
        load_model(bad)


def test_version_bump_names_supported(tmp_path, fitted):
    path = tmp_path / "m.bin"
    persist_model(fitted["majority"], path)
    raw = bytearray(path.read_bytes())
    raw[9] = 42
    bumped = tmp_path / "v42.bin"
    bumped.write_bytes(bytes(raw))
    with pytest.raises(DataError, match=r"version 42 \(supported: 1\)"):
        load_model(bumped)


def test_truncated_file(tmp_path, fitted):
    path = tmp_path / "m.bin"
    persist_model(fitted["gboost"], path)
    raw = path.read_bytes()
    trunc = tmp_path / "trunc.bin"
    trunc.write_bytes(raw[: len(raw) - 20])
    with pytest.raises(DataError, match="truncated"):
        load_model(trunc)


def test_trailing_garbage(tmp_path, fitted):
    path = tmp_path / "m.bin"
    persist_model(fitted["majority"], path)
    padded = tmp_path / "padded.bin"
    padded.write_bytes(path.read_bytes() + b"\x00\x01")
    with pytest.raises(DataError, match="trailing"):
        load_model(padded)
