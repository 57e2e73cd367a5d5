import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from stylo.cli import main
from stylo.eval import EvaluationReport, evaluate
from stylo.corpus import LabelSpace
from stylo.experiment import ResultsTable, load_experiment_config, time_bucket

LS2 = LabelSpace(labels=("OBJ", "SUBJ"))


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    """A small synthetic corpus + config shared by the CLI tests, with
    cheap classifier settings appended."""
    out = tmp_path_factory.mktemp("cli-synth")
    assert run_cli("synth", "--out", str(out), "--seed", "5", "--n", "120") == 0
    config = out / "config.ini"
    cheap = ("knn.k = 5\ngboost.n_stages = 5\nmlp.epochs = 30\nrforest.n_trees = 10\n"
             "logreg.epochs = 50\nlinsvm.epochs = 50\n")
    config.write_text(
        config.read_text(encoding="utf-8").replace("knn.k = 5\n", cheap),
        encoding="utf-8",
    )
    return out


class TestTimeBuckets:
    def test_bucket_boundaries(self):
        assert time_bucket(0.4) == "<1s"
        assert time_bucket(200) == "<5m"
        assert time_bucket(29.9) == "<30s"
        assert time_bucket(45) == "<1m"
        assert time_bucket(3000) == "<1h"
        assert time_bucket(7200) == ">=1h"


class TestTableFormatting:
    def make_report(self, wf1, acc, train_seconds):
        report = evaluate(["OBJ", "SUBJ"], ["OBJ", "SUBJ"], LS2,
                          {"training": train_seconds})
        report.weighted_f1 = wf1
        report.accuracy = acc
        return report

    def test_six_decimal_cells(self):
        table = ResultsTable.from_reports(
            {"gboost": self.make_report(0.7695984, 0.772334, 0.4)}
        )
        text = table.as_text()
        assert "0.769598" in text
        assert "<1s" in text
        assert "GB" in text

    def test_csv_round_trips_to_six_decimals(self):
        reports = {
            "majority": self.make_report(0.4598663, 0.6080691, 0.01),
            "gboost": self.make_report(0.7695984, 0.7723342, 200.0),
        }
        table = ResultsTable.from_reports(reports)
        rows = list(csv.reader(io.StringIO(table.as_csv())))
        assert rows[0] == ["metric", "Majority", "GB"]
        assert rows[1] == ["weightedf1s", "0.459866", "0.769598"]
        assert rows[2] == ["accuracy", "0.608069", "0.772334"]
        assert rows[3] == ["training_time", "<1s", "<5m"]
        for cell, want in zip(rows[1][1:], (0.4598663, 0.7695984)):
            assert float(cell) == pytest.approx(want, abs=5e-7)


class TestIngestAndSplit:
    def test_ingest_stats_and_canonical_output(self, tmp_path, capsys):
        src = tmp_path / "in.tsv"
        src.write_text("key\tbody\tcls\na\thello there\tX\nb\tmore text\tY\n",
                       encoding="utf-8")
        out = tmp_path / "canon.tsv"
        code = run_cli("ingest", "--in", str(src), "--format", "tsv",
                       "--id-field", "key", "--text-field", "body",
                       "--label-field", "cls", "--out", str(out))
        assert code == 0
        printed = capsys.readouterr().out
        assert "2 instances" in printed
        assert out.read_text(encoding="utf-8").startswith("id\ttext\tlabel\n")

    def test_ingest_bad_data_exit_2(self, tmp_path):
        src = tmp_path / "in.tsv"
        src.write_text("id\ttext\tlabel\n", encoding="utf-8")
        assert run_cli("ingest", "--in", str(src), "--out", str(tmp_path / "o.tsv")) == 2

    def test_split_sizes(self, tmp_path, synth_dir):
        train_out = tmp_path / "tr.tsv"
        test_out = tmp_path / "te.tsv"
        code = run_cli("split", "--in", str(synth_dir / "train.tsv"),
                       "--train-out", str(train_out), "--test-out", str(test_out),
                       "--fraction", "0.66", "--seed", "3")
        assert code == 0
        n_train = len(train_out.read_text(encoding="utf-8").strip().split("\n")) - 1
        n_test = len(test_out.read_text(encoding="utf-8").strip().split("\n")) - 1
        assert n_train == int(0.66 * (n_train + n_test))


class TestStagedWorkflow:
    def test_featurize_train_evaluate(self, synth_dir, tmp_path):
        out = tmp_path / "staged"
        args = ["--config", str(synth_dir / "config.ini"), "--out", str(out),
                "--classifiers", "majority,dtree"]
        assert run_cli("featurize", *args) == 0
        assert (out / "pipeline.bin").is_file()
        assert run_cli("train", *args) == 0
        assert (out / "models" / "dtree.bin").is_file()
        assert run_cli("evaluate", *args) == 0
        assert (out / "results_table.csv").is_file()
        payload = json.loads((out / "report.dtree.json").read_text(encoding="utf-8"))
        assert 0.0 <= payload["weighted_f1"] <= 1.0

    def test_train_without_featurize_is_config_error(self, synth_dir, tmp_path):
        out = tmp_path / "nothing"
        code = run_cli("train", "--config", str(synth_dir / "config.ini"),
                       "--out", str(out))
        assert code == 1

    def test_featurize_never_touches_test_file(self, synth_dir, tmp_path):
        # spec invariant: fitting must not read the test dataset
        workdir = tmp_path / "leak"
        shutil.copytree(synth_dir, workdir)
        out_a = tmp_path / "with-test"
        assert run_cli("featurize", "--config", str(workdir / "config.ini"),
                       "--out", str(out_a)) == 0
        (workdir / "test.tsv").unlink()
        out_b = tmp_path / "without-test"
        assert run_cli("featurize", "--config", str(workdir / "config.ini"),
                       "--out", str(out_b)) == 0
        assert (out_a / "pipeline.bin").read_bytes() == (out_b / "pipeline.bin").read_bytes()


class TestRun:
    def test_run_produces_full_tree(self, synth_dir, tmp_path, capsys):
        out = tmp_path / "full"
        code = run_cli("run", "--config", str(synth_dir / "config.ini"),
                       "--out", str(out), "--classifiers", "majority,knn,dtree")
        assert code == 0
        for name in ("manifest.json", "results_table.txt", "results_table.csv",
                     "pipeline.bin", "report.majority.json", "models"):
            assert (out / name).exists()
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["classifiers"] == ["majority", "knn", "dtree"]
        assert manifest["train_instances"] == 79  # floor(0.66 * 120)

    def test_run_refuses_nonempty_out(self, synth_dir, tmp_path):
        out = tmp_path / "occupied"
        out.mkdir()
        (out / "junk.txt").write_text("x", encoding="utf-8")
        code = run_cli("run", "--config", str(synth_dir / "config.ini"),
                       "--out", str(out))
        assert code == 1

    def test_features_ablation_filter(self, synth_dir, tmp_path):
        out = tmp_path / "ablate"
        code = run_cli("run", "--config", str(synth_dir / "config.ini"),
                       "--out", str(out), "--classifiers", "majority,dtree",
                       "--features", "char_bow")
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["feature_blocks"] == ["char_bow"]

    def test_seed_override_changes_split(self, synth_dir, tmp_path):
        cfg_text = (synth_dir / "config.ini").read_text(encoding="utf-8")
        single_cfg = tmp_path / "single.ini"
        single_cfg.write_text(
            cfg_text.replace("train = train.tsv\ntest = test.tsv",
                             f"single = {synth_dir}/train.tsv\ntrain_fraction = 0.66")
            .replace("embedding.path = embeddings.tsv",
                     f"embedding.path = {synth_dir}/embeddings.tsv"),
            encoding="utf-8",
        )
        out_a = tmp_path / "seed-a"
        out_b = tmp_path / "seed-b"
        base = ["--config", str(single_cfg), "--classifiers", "majority"]
        assert run_cli("run", *base, "--out", str(out_a), "--seed", "1") == 0
        assert run_cli("run", *base, "--out", str(out_b), "--seed", "2") == 0
        a = json.loads((out_a / "manifest.json").read_text(encoding="utf-8"))
        b = json.loads((out_b / "manifest.json").read_text(encoding="utf-8"))
        assert a["seed"] == 1 and b["seed"] == 2


class TestConlluAnnotations:
    def test_morph_and_pos_blocks_from_conllu_config(self, tmp_path):
        from stylo.annotate import AnnotatedSentence, Token, write_conllu
        from stylo.corpus import Dataset, Instance, LabelSpace, save_dataset_tsv

        rng_texts = {
            "a1": ("Cats sleep daily.", "A"), "a2": ("Dogs bark loudly.", "A"),
            "a3": ("Cats purr softly.", "A"), "b1": ("Stocks fell sharply.", "B"),
            "b2": ("Prices rose quickly.", "B"), "b3": ("Markets closed early.", "B"),
        }
        instances = [Instance(i, t, l) for i, (t, l) in rng_texts.items()]
        ds = Dataset(instances, LabelSpace(labels=("A", "B")))
        train = Dataset(instances[:2] + instances[3:5], ds.label_space)
        test = Dataset([instances[2], instances[5]], ds.label_space)
        save_dataset_tsv(train, tmp_path / "train.tsv")
        save_dataset_tsv(test, tmp_path / "test.tsv")
        sentences = []
        for inst in instances:
            tokens = []
            for w in inst.text.rstrip(".").split():
                feats = frozenset({"Number=Plur"} if w.endswith("s") else {"Degree=Pos"})
                tokens.append(Token(w, pos="NOUN" if w.endswith("s") else "ADV",
                                    morph=feats))
            sentences.append(AnnotatedSentence(inst.id, tokens))
        write_conllu(sentences, tmp_path / "ann.conllu")
        (tmp_path / "cfg.ini").write_text(
            "[experiment]\nconfig_version = 1\nseed = 1\nnormalize_timings = true\n"
            "[data]\nformat = tsv\ntrain = train.tsv\ntest = test.tsv\n"
            "[annotations]\nconllu = ann.conllu\n"
            "[features]\nblocks = pos_bow,morph\npos_bow.n_max = 2\n"
            "[classifiers]\nrun = majority,dtree\n"
            "[output]\ndir = out\n",
            encoding="utf-8",
        )
        assert run_cli("run", "--config", str(tmp_path / "cfg.ini")) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["feature_blocks"] == ["pos_bow", "morph"]
        assert manifest["feature_dimension"] > 0


class TestOrdinalTask:
    def test_3class_run_reports_mae(self, tmp_path):
        corpus = tmp_path / "c3"
        assert run_cli("synth", "--out", str(corpus), "--seed", "3", "--n", "150",
                       "--task", "3class") == 0
        config = corpus / "config.ini"
        config.write_text(
            config.read_text(encoding="utf-8").replace("knn.k = 5", "knn.k = 5\ndtree.max_depth = 6"),
            encoding="utf-8",
        )
        out = tmp_path / "out3"
        assert run_cli("run", "--config", str(config), "--out", str(out),
                       "--classifiers", "majority,dtree") == 0
        payload = json.loads((out / "report.dtree.json").read_text(encoding="utf-8"))
        assert payload["mae"] is not None
        assert 0.0 <= payload["mae"] <= 2.0
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["labels"] == ["left", "center", "right"]


class TestThreadCapEnv:
    def test_invalid_value_is_config_error(self, synth_dir, monkeypatch):
        monkeypatch.setenv("STYLO_THREADS", "many")
        assert run_cli("report", "--out", str(synth_dir)) == 1

    def test_valid_value_accepted(self, tmp_path, monkeypatch):
        monkeypatch.setenv("STYLO_THREADS", "4")
        src = tmp_path / "in.tsv"
        src.write_text("id\ttext\tlabel\na\thello\tX\nb\tbye\tY\n", encoding="utf-8")
        assert run_cli("ingest", "--in", str(src), "--out", str(tmp_path / "o.tsv")) == 0


class TestReportCommand:
    def test_rebuilds_table_from_reports(self, synth_dir, tmp_path, capsys):
        out = tmp_path / "rpt"
        assert run_cli("run", "--config", str(synth_dir / "config.ini"),
                       "--out", str(out), "--classifiers", "majority,dtree") == 0
        (out / "results_table.txt").unlink()
        assert run_cli("report", "--out", str(out)) == 0
        assert (out / "results_table.txt").is_file()
        printed = capsys.readouterr().out
        assert "weightedf1s" in printed

    def test_no_reports_is_data_error(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        assert run_cli("report", "--out", str(empty)) == 2


class TestConfigParsing:
    def test_missing_version(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[data]\ntrain = a\ntest = b\n", encoding="utf-8")
        from stylo.errors import ConfigError
        with pytest.raises(ConfigError, match="config_version"):
            load_experiment_config(cfg)

    def test_unknown_block_rejected(self, tmp_path, synth_dir):
        text = (synth_dir / "config.ini").read_text(encoding="utf-8")
        cfg = tmp_path / "c.ini"
        cfg.write_text(text.replace("blocks = word_bow", "blocks = sub_word,word_bow"),
                       encoding="utf-8")
        from stylo.errors import ConfigError
        with pytest.raises(ConfigError, match="sub_word"):
            load_experiment_config(cfg)

    def test_unknown_hyperparameter_rejected(self, tmp_path, synth_dir):
        text = (synth_dir / "config.ini").read_text(encoding="utf-8")
        cfg = tmp_path / "c.ini"
        cfg.write_text(text.replace("knn.k = 5", "knn.k = 5\nknn.neighbors = 7"),
                       encoding="utf-8")
        from stylo.errors import ConfigError
        with pytest.raises(ConfigError, match="neighbors"):
            load_experiment_config(cfg)

    def test_classifier_params_reach_models(self, synth_dir):
        cfg = load_experiment_config(synth_dir / "config.ini")
        knn = next(s for s in cfg.classifiers if s.kind == "knn")
        assert knn.params["k"] == 5
        gboost = next(s for s in cfg.classifiers if s.kind == "gboost")
        assert gboost.params["n_stages"] == 5


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stylo.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "synth" in proc.stdout
