"""Command-line interface.

Subcommands: ingest, split, featurize, train, evaluate, run, synth, report.
Exit codes: 0 success, 1 usage/config error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classifiers import TABLE_ORDER, load_model
from .corpus import (
    RecordSchema,
    SplitSpec,
    class_distribution,
    load_dataset,
    save_dataset_tsv,
    train_test_split,
)
from .errors import ConfigError, DataError, StyloError
from .eval import EvaluationReport, evaluate, save_report_json, save_report_text
from .experiment import (
    ResultsTable,
    assemble_annotations,
    assemble_embeddings,
    fit_pipeline_for_config,
    load_experiment_config,
    load_train_test,
    run_experiment,
    time_bucket,
)
from .features import FeaturePipeline
from .synth import generate_synthetic_corpus


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors reported on exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_args(p, label_optional=False):
    p.add_argument("--in", dest="in_path", required=True, help="input dataset file")
    p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    p.add_argument("--id-field", default="id")
    p.add_argument("--text-field", default="text")
    p.add_argument("--label-field", default="label",
                   help="label column/field name%s" % (" (empty for unlabeled)" if label_optional else ""))
    p.add_argument("--headline-field", default=None,
                   help="optional headline column, joined as headline + blank line + body")


def _schema(args) -> RecordSchema:
    return RecordSchema(id=args.id_field, text=args.text_field,
                        label=args.label_field or None,
                        headline=args.headline_field)


def _add_config_args(p):
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="global seed (overrides config)")
    p.add_argument("--classifiers", help="comma list restricting the classifiers to run")
    p.add_argument("--features", help="comma list restricting the feature blocks (ablations)")


def _load_config(args):
    return load_experiment_config(
        args.config,
        seed_override=args.seed,
        out_override=args.out,
        classifier_filter=args.classifiers.split(",") if args.classifiers else None,
        feature_filter=args.features.split(",") if args.features else None,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="stylo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[], help="validate a dataset and write canonical TSV")
    _add_io_args(p, label_optional=True)
    p.add_argument("--out", required=True, help="canonical TSV output path")

    p = sub.add_parser("split", help="deterministic train/test split of one file")
    _add_io_args(p)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--fraction", type=float, default=0.66)
    p.add_argument("--seed", type=int, default=0)

    for name, helptext in (
        ("featurize", "fit the feature pipeline on training data only"),
        ("train", "train classifiers on the fitted pipeline"),
        ("evaluate", "evaluate persisted models on the test split"),
        ("run", "end-to-end: featurize + train + evaluate into a fresh output tree"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_config_args(p)

    p = sub.add_parser("synth", help="generate the bundled synthetic corpora")
    p.add_argument("--out", required=True, help="directory for corpus files and config")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--task", choices=("2class", "3class"), default="2class")

    p = sub.add_parser("report", help="re-emit results tables from report.*.json files")
    p.add_argument("--out", required=True, help="directory containing report.<kind>.json")

    return parser


# --------------------------------------------------------------------------
# subcommand bodies
# --------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    dataset = load_dataset(args.in_path, args.format, _schema(args))
    save_dataset_tsv(dataset, args.out)
    print(f"{len(dataset)} instances, labels: {list(dataset.label_space.labels)}")
    for label, (count, prevalence) in sorted(class_distribution(dataset).items()):
        print(f"  {label}: {count} ({float(prevalence):.4f})")
    return 0


def _cmd_split(args) -> int:
    dataset = load_dataset(args.in_path, args.format, _schema(args))
    train, test = train_test_split(dataset, SplitSpec(args.fraction, args.seed))
    save_dataset_tsv(train, args.train_out)
    save_dataset_tsv(test, args.test_out)
    print(f"train: {len(train)} -> {args.train_out}")
    print(f"test:  {len(test)} -> {args.test_out}")
    return 0


def _load_train_only(cfg):
    if cfg.single_path is not None:
        train, _ = load_train_test(cfg)
        return train
    return load_dataset(cfg.train_path, cfg.data_format, cfg.schema,
                        cfg.label_space(), name="train")


def _cmd_featurize(args) -> int:
    cfg = _load_config(args)
    train = _load_train_only(cfg)
    annotations = assemble_annotations(cfg, [train])
    embeddings = assemble_embeddings(cfg)
    pipeline = fit_pipeline_for_config(cfg, train, annotations, embeddings)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "pipeline.bin"
    pipeline.save(path)
    print(f"fitted pipeline: dimension {pipeline.total_dimension_} -> {path}")
    return 0


def _cmd_train(args) -> int:
    from .classifiers import make_classifier, persist_model

    cfg = _load_config(args)
    pipeline_path = cfg.out_dir / "pipeline.bin"
    if not pipeline_path.is_file():
        raise ConfigError(f"{pipeline_path} not found; run `stylo featurize` first")
    pipeline = FeaturePipeline.load(pipeline_path)
    train, _ = load_train_test(cfg)
    annotations = assemble_annotations(cfg, [train])
    embeddings = assemble_embeddings(cfg)
    x_train = pipeline.transform(train, annotations, embeddings)
    y_train = train.labels()
    models_dir = cfg.out_dir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    for spec in cfg.classifiers:
        model = make_classifier(spec.kind, **spec.params).fit(x_train, y_train, train.label_space)
        if cfg.normalize_timings:
            model.training_time_ = 0.0
        persist_model(model, models_dir / f"{spec.kind}.bin")
        print(f"{spec.kind}: trained in {model.training_time_:.2f}s")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    pipeline_path = cfg.out_dir / "pipeline.bin"
    if not pipeline_path.is_file():
        raise ConfigError(f"{pipeline_path} not found; run `stylo featurize` first")
    pipeline = FeaturePipeline.load(pipeline_path)
    _, test = load_train_test(cfg)
    annotations = assemble_annotations(cfg, [test])
    embeddings = assemble_embeddings(cfg)
    x_test = pipeline.transform(test, annotations, embeddings)
    y_test = test.labels()
    reports = {}
    for spec in cfg.classifiers:
        model_path = cfg.out_dir / "models" / f"{spec.kind}.bin"
        if not model_path.is_file():
            raise ConfigError(f"{model_path} not found; run `stylo train` first")
        model = load_model(model_path)
        timings = {"training": model.training_time_}
        report = evaluate(y_test, model.predict(x_test), test.label_space, timings)
        reports[spec.kind] = report
        save_report_json(report, cfg.out_dir / f"report.{spec.kind}.json")
        save_report_text(report, cfg.out_dir / f"report.{spec.kind}.txt")
    table = ResultsTable.from_reports(reports)
    (cfg.out_dir / "results_table.txt").write_text(table.as_text(), encoding="utf-8")
    (cfg.out_dir / "results_table.csv").write_text(table.as_csv(), encoding="utf-8")
    print(table.as_text(), end="")
    return 0


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    _, table = run_experiment(cfg)
    print(table.as_text(), end="")
    print(f"outputs in {cfg.out_dir}")
    return 0


_SYNTH_CONFIG_TEMPLATE = """\
[experiment]
config_version = 1
seed = {seed}
normalize_timings = true

[data]
format = tsv
train = train.tsv
test = test.tsv
id_field = id
text_field = text
label_field = label
labels = {labels}
ordinal = {ordinal}
{ordinal_values_line}
[features]
blocks = word_bow,word_tfidf,char_bow,pos_bow,embedding
word_bow.min_df = 2
word_tfidf.min_df = 2
char_bow.min_df = 2
char_bow.max_features = 3000
char_bow.n_min = 1
char_bow.n_max = 4
pos_bow.min_df = 2
pos_bow.n_min = 1
pos_bow.n_max = 4
embedding.path = embeddings.tsv
embedding.dim = 16

[classifiers]
run = majority,knn,logreg,linsvm,mlp,dtree,rforest,gboost
knn.k = 5

[output]
dir = out
"""


def _cmd_synth(args) -> int:
    files = generate_synthetic_corpus(args.out, seed=args.seed, n=args.n, task=args.task)
    ls = files.label_space
    ordinal_values_line = ""
    if ls.ordinal:
        pairs = ",".join(f"{label}={ls.ordinal_values[label]}" for label in ls.labels)
        ordinal_values_line = f"ordinal_values = {pairs}\n"
    config_text = _SYNTH_CONFIG_TEMPLATE.format(
        seed=args.seed,
        labels=",".join(ls.labels),
        ordinal="true" if ls.ordinal else "false",
        ordinal_values_line=ordinal_values_line,
    )
    config_path = Path(args.out) / "config.ini"
    config_path.write_text(config_text, encoding="utf-8")
    print(f"wrote {files.train_path}, {files.test_path}, {files.embeddings_path}")
    print(f"wrote {config_path}")
    return 0


def _cmd_report(args) -> int:
    out_dir = Path(args.out)
    reports: dict[str, EvaluationReport] = {}
    found = sorted(out_dir.glob("report.*.json"))
    if not found:
        raise DataError(f"no report.*.json files in {out_dir}")
    table_kinds, wf1s, accs, secs = [], [], [], []
    for path in found:
        kind = path.name.split(".")[1]
        payload = json.loads(path.read_text(encoding="utf-8"))
        table_kinds.append(kind)
        wf1s.append(payload["weighted_f1"])
        accs.append(payload["accuracy"])
        secs.append(payload.get("timing", {}).get("training_seconds", 0.0))
    order = [k for k in TABLE_ORDER if k in table_kinds] + [
        k for k in table_kinds if k not in TABLE_ORDER
    ]
    idx = [table_kinds.index(k) for k in order]
    table = ResultsTable(
        kinds=order,
        weighted_f1s=[wf1s[i] for i in idx],
        accuracies=[accs[i] for i in idx],
        training_seconds=[secs[i] for i in idx],
    )
    (out_dir / "results_table.txt").write_text(table.as_text(), encoding="utf-8")
    (out_dir / "results_table.csv").write_text(table.as_csv(), encoding="utf-8")
    print(table.as_text(), end="")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "split": _cmd_split,
    "featurize": _cmd_featurize,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "run": _cmd_run,
    "synth": _cmd_synth,
    "report": _cmd_report,
}


def _check_thread_cap() -> None:
    import os

    raw = os.environ.get("STYLO_THREADS")
    if raw is None:
        return
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"STYLO_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError("STYLO_THREADS must be >= 1")
    # execution is sequential, which satisfies any cap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_thread_cap()
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"stylo: config error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"stylo: data error: {e}", file=sys.stderr)
        return 2
    except StyloError as e:
        print(f"stylo: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
