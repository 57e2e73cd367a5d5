"""Config-driven experiment runner.

A single INI-style config describes data, features, classifiers and output;
``run_experiment`` executes ingest -> annotate -> featurize -> train ->
evaluate and writes a deterministic output tree:

    report.<classifier>.json / .txt   per-classifier evaluation reports
    results_table.txt / .csv          results table (weightedf1s,
                                      accuracy, training time buckets)
    models/<classifier>.bin           persisted models
    pipeline.bin                      persisted feature pipeline
    manifest.json                     config hash, seed, versions

With ``normalize_timings = true`` every wall-clock value in the outputs is
zeroed so two runs of the same config produce byte-identical trees (raw
timings are still printed to stderr).
"""

from __future__ import annotations

import configparser
import hashlib
import inspect
import json
import os
import shutil
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .annotate import annotate_with_builtin_tagger, group_by_instance, load_conllu
from .classifiers import (
    CLASSIFIER_KINDS,
    DISPLAY_NAMES,
    TABLE_ORDER,
    make_classifier,
    persist_model,
)
from .corpus import Dataset, LabelSpace, RecordSchema, SplitSpec, load_dataset, train_test_split
from .errors import ConfigError, DataError
from .eval import EvaluationReport, evaluate, save_report_json, save_report_text
from .features import (
    BLOCK_ORDER,
    BlockConfig,
    EmbeddingBlockConfig,
    FeaturePipeline,
    PipelineConfig,
    load_embeddings,
)

CONFIG_VERSION = 1

TIME_BUCKETS = ((1.0, "<1s"), (30.0, "<30s"), (60.0, "<1m"), (300.0, "<5m"), (3600.0, "<1h"))


def time_bucket(seconds: float) -> str:
    """Smallest presentation bucket containing the measured time."""
    for limit, label in TIME_BUCKETS:
        if seconds < limit:
            return label
    return ">=1h"


@dataclass
class ClassifierSpec:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    config_path: Path
    seed: int
    normalize_timings: bool
    data_format: str
    schema: RecordSchema
    train_path: Path | None
    test_path: Path | None
    single_path: Path | None
    train_fraction: float
    explicit_labels: tuple[str, ...] | None
    ordinal: bool
    ordinal_values: dict[str, int] | None
    conllu_path: Path | None
    pipeline_config: PipelineConfig
    classifiers: list[ClassifierSpec]
    out_dir: Path

    def label_space(self) -> LabelSpace | None:
        if self.explicit_labels is None:
            return None
        return LabelSpace(labels=self.explicit_labels, ordinal=self.ordinal,
                          ordinal_values=self.ordinal_values)


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {raw!r}")


def _coerce_param(raw: str, default):
    """Interpret a config string according to a hyperparameter's default."""
    raw = raw.strip()
    if raw == "":
        return None
    if isinstance(default, bool):
        return _parse_bool(raw, "parameter")
    if isinstance(default, int) and not isinstance(default, bool):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if default is None or isinstance(default, str):
        for cast in (int, float):
            try:
                return cast(raw)
            except ValueError:
                pass
        return raw
    raise ConfigError(f"cannot interpret parameter value {raw!r}")


def load_experiment_config(path: str | Path, seed_override: int | None = None,
                           out_override: str | None = None,
                           classifier_filter: list[str] | None = None,
                           feature_filter: list[str] | None = None) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(path.read_text(encoding="utf-8"))
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from None

    def get(section: str, key: str, fallback: str | None = None) -> str | None:
        if parser.has_option(section, key):
            return parser.get(section, key)
        return fallback

    version = get("experiment", "config_version")
    if version is None:
        raise ConfigError(f"{path}: missing config_version in [experiment]")
    if int(version) != CONFIG_VERSION:
        raise ConfigError(f"{path}: unsupported config_version {version} (supported: {CONFIG_VERSION})")

    base = path.parent

    def resolve(value: str | None) -> Path | None:
        if value is None or value.strip() == "":
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    train_path = resolve(get("data", "train"))
    test_path = resolve(get("data", "test"))
    single_path = resolve(get("data", "single"))
    if single_path is not None:
        if train_path is not None or test_path is not None:
            raise ConfigError(f"{path}: give either train+test or single, not both")
    elif train_path is None or test_path is None:
        raise ConfigError(f"{path}: [data] needs train+test paths or a single path")

    labels_raw = get("data", "labels")
    explicit_labels = None
    if labels_raw:
        explicit_labels = tuple(s.strip() for s in labels_raw.split(",") if s.strip())
    ordinal = _parse_bool(get("data", "ordinal", "false"), "data.ordinal")
    ordinal_values = None
    ov_raw = get("data", "ordinal_values")
    if ov_raw:
        ordinal_values = {}
        for part in ov_raw.split(","):
            name, _, rank = part.partition("=")
            if not rank:
                raise ConfigError(f"{path}: bad ordinal_values entry {part!r}")
            ordinal_values[name.strip()] = int(rank)
    if ordinal and (explicit_labels is None or ordinal_values is None):
        raise ConfigError(f"{path}: ordinal data needs explicit labels and ordinal_values")

    label_field = get("data", "label_field", "label")
    schema = RecordSchema(
        id=get("data", "id_field", "id"),
        text=get("data", "text_field", "text"),
        label=label_field if label_field else None,
        headline=get("data", "headline_field") or None,
    )

    blocks_raw = get("features", "blocks")
    if not blocks_raw:
        raise ConfigError(f"{path}: [features] blocks is required")
    block_names = [b.strip() for b in blocks_raw.split(",") if b.strip()]
    for name in block_names:
        if name not in BLOCK_ORDER:
            raise ConfigError(f"{path}: unknown feature block {name!r}")
    if feature_filter is not None:
        for name in feature_filter:
            if name not in BLOCK_ORDER:
                raise ConfigError(f"unknown feature block in --features: {name!r}")
        block_names = [b for b in block_names if b in feature_filter]
        if not block_names:
            raise ConfigError("--features filtered out every block")

    block_kwargs = {}
    for name in block_names:
        if name == "embedding":
            emb_path = get("features", "embedding.path")
            emb_dim = get("features", "embedding.dim")
            if emb_path is None or emb_dim is None:
                raise ConfigError(f"{path}: embedding block needs embedding.path and embedding.dim")
            block_kwargs[name] = EmbeddingBlockConfig(dim=int(emb_dim), path=str(resolve(emb_path)))
        else:
            opts = {}
            for opt, default in (("min_df", 1), ("max_features", None), ("n_min", 1),
                                 ("n_max", 4), ("sublinear_tf", False)):
                raw = get("features", f"{name}.{opt}")
                if raw is not None:
                    opts[opt] = _coerce_param(raw, default if default is not None else 0)
            if name in ("word_bow", "word_tfidf"):
                opts.setdefault("n_min", 1)
                opts.setdefault("n_max", 1)
            block_kwargs[name] = BlockConfig(**opts)
    pipeline_config = PipelineConfig(**block_kwargs)

    run_raw = get("classifiers", "run")
    if not run_raw:
        raise ConfigError(f"{path}: [classifiers] run is required")
    kinds = [k.strip() for k in run_raw.split(",") if k.strip()]
    if classifier_filter is not None:
        for k in classifier_filter:
            if k not in CLASSIFIER_KINDS:
                raise ConfigError(f"unknown classifier in --classifiers: {k!r}")
        kinds = [k for k in kinds if k in classifier_filter]
        if not kinds:
            raise ConfigError("--classifiers filtered out every classifier")

    seed = seed_override if seed_override is not None else int(get("experiment", "seed", "0"))
    specs = []
    for kind in kinds:
        cls = CLASSIFIER_KINDS.get(kind)
        if cls is None:
            raise ConfigError(f"{path}: unknown classifier kind {kind!r}")
        defaults = {
            name: p.default
            for name, p in inspect.signature(cls.__init__).parameters.items()
            if name != "self"
        }
        params = {}
        for key in parser.options("classifiers") if parser.has_section("classifiers") else []:
            if not key.startswith(kind + "."):
                continue
            pname = key[len(kind) + 1 :]
            if pname not in defaults:
                raise ConfigError(f"{path}: {kind} has no hyperparameter {pname!r}")
            params[pname] = _coerce_param(parser.get("classifiers", key), defaults[pname])
        if "seed" in defaults and "seed" not in params:
            params["seed"] = seed
        specs.append(ClassifierSpec(kind=kind, params=params))

    out_raw = out_override if out_override is not None else get("output", "dir", "out")
    out_dir = Path(out_raw)
    if not out_dir.is_absolute():
        out_dir = (base / out_dir) if out_override is None else Path(out_raw)

    return ExperimentConfig(
        config_path=path,
        seed=seed,
        normalize_timings=_parse_bool(get("experiment", "normalize_timings", "false"),
                                      "experiment.normalize_timings"),
        data_format=get("data", "format", "tsv"),
        schema=schema,
        train_path=train_path,
        test_path=test_path,
        single_path=single_path,
        train_fraction=float(get("data", "train_fraction", "0.66")),
        explicit_labels=explicit_labels,
        ordinal=ordinal,
        ordinal_values=ordinal_values,
        conllu_path=resolve(get("annotations", "conllu")),
        pipeline_config=pipeline_config,
        classifiers=specs,
        out_dir=out_dir,
    )


# --------------------------------------------------------------------------
# Data assembly
# --------------------------------------------------------------------------


def load_train_test(cfg: ExperimentConfig) -> tuple[Dataset, Dataset]:
    ls = cfg.label_space()
    if cfg.single_path is not None:
        full = load_dataset(cfg.single_path, cfg.data_format, cfg.schema, ls)
        return train_test_split(full, SplitSpec(cfg.train_fraction, cfg.seed))
    train = load_dataset(cfg.train_path, cfg.data_format, cfg.schema, ls, name="train")
    if ls is None:
        # the test side must share the train label space
        ls = train.label_space
    test = load_dataset(cfg.test_path, cfg.data_format, cfg.schema, ls, name="test")
    return train, test


def assemble_annotations(cfg: ExperimentConfig, datasets: list[Dataset]):
    """CoNLL-U annotations when configured, else the builtin rule tagger."""
    needs = cfg.pipeline_config.pos_bow is not None or cfg.pipeline_config.morph is not None
    if not needs:
        return None
    if cfg.conllu_path is not None:
        return group_by_instance(load_conllu(cfg.conllu_path))
    annotations = {}
    for dataset in datasets:
        for inst in dataset.instances:
            annotations[inst.id] = annotate_with_builtin_tagger(inst.id, inst.text)
    return annotations


def assemble_embeddings(cfg: ExperimentConfig):
    emb_cfg = cfg.pipeline_config.embedding
    if emb_cfg is None:
        return None
    if emb_cfg.path is None:
        raise ConfigError("embedding block enabled but no embedding path configured")
    return load_embeddings(emb_cfg.path, emb_cfg.dim)


# --------------------------------------------------------------------------
# Results table
# --------------------------------------------------------------------------

TABLE_METRIC_ROWS = ("weightedf1s", "accuracy", "Training time")


@dataclass
class ResultsTable:
    kinds: list[str]           # table column order
    weighted_f1s: list[float]
    accuracies: list[float]
    training_seconds: list[float]

    @classmethod
    def from_reports(cls, reports: dict[str, EvaluationReport]) -> "ResultsTable":
        kinds = [k for k in TABLE_ORDER if k in reports]
        return cls(
            kinds=kinds,
            weighted_f1s=[reports[k].weighted_f1 for k in kinds],
            accuracies=[reports[k].accuracy for k in kinds],
            training_seconds=[reports[k].timings.get("training", 0.0) for k in kinds],
        )

    def as_text(self) -> str:
        headers = [""] + [DISPLAY_NAMES.get(k, k) for k in self.kinds]
        rows = [
            ["weightedf1s"] + [f"{v:.6f}" for v in self.weighted_f1s],
            ["accuracy"] + [f"{v:.6f}" for v in self.accuracies],
            ["Training time"] + [time_bucket(v) for v in self.training_seconds],
        ]
        widths = [max(len(row[i]) for row in [headers] + rows) for i in range(len(headers))]
        lines = []
        for row in [headers] + rows:
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        return "\n".join(lines) + "\n"

    def as_csv(self) -> str:
        lines = ["metric," + ",".join(DISPLAY_NAMES.get(k, k) for k in self.kinds)]
        lines.append("weightedf1s," + ",".join(f"{v:.6f}" for v in self.weighted_f1s))
        lines.append("accuracy," + ",".join(f"{v:.6f}" for v in self.accuracies))
        lines.append("training_time," + ",".join(time_bucket(v) for v in self.training_seconds))
        return "\n".join(lines) + "\n"


def emit_results_table(reports: dict[str, EvaluationReport]) -> tuple[str, str]:
    if not reports:
        raise DataError("no reports to tabulate")
    table = ResultsTable.from_reports(reports)
    return table.as_text(), table.as_csv()


# --------------------------------------------------------------------------
# The runner
# --------------------------------------------------------------------------


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def fit_pipeline_for_config(cfg: ExperimentConfig, train: Dataset,
                            annotations, embeddings) -> FeaturePipeline:
    return FeaturePipeline(cfg.pipeline_config).fit(train, annotations, embeddings)


def run_experiment(cfg: ExperimentConfig) -> tuple[dict[str, EvaluationReport], ResultsTable]:
    """Execute the full pipeline and write the output tree atomically."""
    import time as _time

    out_dir = cfg.out_dir
    if out_dir.exists() and any(out_dir.iterdir()):
        raise ConfigError(f"output directory {out_dir} exists and is not empty")
    staging = out_dir.parent / f".{out_dir.name}.partial"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir(parents=True)
    try:
        reports, table = _run_into(cfg, staging, _time)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    if out_dir.exists():
        out_dir.rmdir()
    os.replace(staging, out_dir)
    return reports, table


def _run_into(cfg: ExperimentConfig, staging: Path, _time):
    train, test = load_train_test(cfg)
    _log(f"train: {len(train)} instances, test: {len(test)}, labels: {list(train.label_space.labels)}")

    t0 = _time.perf_counter()
    annotations = assemble_annotations(cfg, [train, test])
    embeddings = assemble_embeddings(cfg)
    pipeline = fit_pipeline_for_config(cfg, train, annotations, embeddings)
    x_train = pipeline.transform(train, annotations, embeddings)
    x_test = pipeline.transform(test, annotations, embeddings)
    fe_seconds = _time.perf_counter() - t0
    _log(f"feature extraction: {fe_seconds:.2f}s ({fe_seconds / 60.0:.2f} min), "
         f"dimension {pipeline.total_dimension_}")

    pipeline.save(staging / "pipeline.bin")
    (staging / "models").mkdir()

    y_train = train.labels()
    y_test = test.labels()
    reports: dict[str, EvaluationReport] = {}
    for spec in cfg.classifiers:
        model = make_classifier(spec.kind, **spec.params)
        model.fit(x_train, y_train, train.label_space)
        t0 = _time.perf_counter()
        predictions = model.predict(x_test)
        predict_seconds = _time.perf_counter() - t0
        timings = {
            "feature_extraction": fe_seconds,
            "training": model.training_time_,
            "prediction": predict_seconds,
        }
        if cfg.normalize_timings:
            timings = {k: 0.0 for k in timings}
            model.training_time_ = 0.0
        report = evaluate(y_test, predictions, train.label_space, timings)
        reports[spec.kind] = report
        _log(
            f"{spec.kind}: weighted_f1={report.weighted_f1:.6f} "
            f"accuracy={report.accuracy:.6f} train={model.training_time_:.2f}s"
        )
        persist_model(model, staging / "models" / f"{spec.kind}.bin")
        save_report_json(report, staging / f"report.{spec.kind}.json")
        save_report_text(report, staging / f"report.{spec.kind}.txt")

    text, csv = emit_results_table(reports)
    (staging / "results_table.txt").write_text(text, encoding="utf-8")
    (staging / "results_table.csv").write_text(csv, encoding="utf-8")
    _write_manifest(cfg, staging, train, test, pipeline)
    return reports, ResultsTable.from_reports(reports)


def _write_manifest(cfg: ExperimentConfig, staging: Path, train: Dataset,
                    test: Dataset, pipeline: FeaturePipeline) -> None:
    manifest = {
        "config_version": CONFIG_VERSION,
        "config_sha256": hashlib.sha256(cfg.config_path.read_bytes()).hexdigest(),
        "seed": cfg.seed,
        "package_version": __version__,
        "formats": {"model": "STYLOMDL1", "pipeline": "STYLOPIPE1"},
        "classifiers": [spec.kind for spec in cfg.classifiers],
        "feature_blocks": cfg.pipeline_config.enabled_blocks(),
        "feature_dimension": pipeline.total_dimension_,
        "train_instances": len(train),
        "test_instances": len(test),
        "labels": list(train.label_space.labels),
        "normalize_timings": cfg.normalize_timings,
    }
    payload = json.dumps(manifest, indent=2, sort_keys=True)
    (staging / "manifest.json").write_text(payload + "\n", encoding="utf-8")
