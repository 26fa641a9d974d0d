import json

import numpy as np
import pandas as pd
import pytest
import yaml

from fedmatrix.cli import main
from fedmatrix.experiment import read_manifest

from conftest import TINY_SETTINGS


def _run(command, config_file, tmp_path, *extra):
    return main([command, "--config", str(config_file), "--out-dir", str(tmp_path / "runs"), *extra])


def test_generate_data_writes_client_files(tmp_path, tiny_config_file):
    assert _run("generate-data", tiny_config_file, tmp_path, "--run-name", "a") == 0
    run_dir = tmp_path / "runs" / "a"
    names = sorted(p.name for p in run_dir.iterdir())
    assert names == ["client_0.csv", "client_1.csv", "manifest.json", "test.csv"]
    manifest = read_manifest(run_dir / "manifest.json")
    total = sum(manifest.details["rows"].values())
    assert total == sum(TINY_SETTINGS["sample_sizes"])
    header = (run_dir / "client_0.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",")[-1] == "label"

    assert _run("generate-data", tiny_config_file, tmp_path, "--run-name", "b") == 0
    for name in ("client_0.csv", "client_1.csv", "test.csv"):
        assert (run_dir / name).read_bytes() == (tmp_path / "runs" / "b" / name).read_bytes()


def test_train_single_round(tmp_path, tiny_config_file):
    assert _run("train", tiny_config_file, tmp_path, "--run-name", "t", "--set", "aggregation_mode=encrypted") == 0
    run_dir = tmp_path / "runs" / "t"
    log = pd.read_csv(run_dir / "round_log.csv")
    assert list(log.columns) == [
        "round", "mu", "strategy", "selected_ids", "gamma_values",
        "test_recall", "test_precision", "test_f1", "duration_ms",
    ]
    assert log["round"].tolist() == [1]
    assert log["strategy"].tolist() == ["pbcs/varying"]
    summary = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
    assert summary["best_round"] in (0, 1)
    manifest = read_manifest(run_dir / "manifest.json")
    assert manifest.command == "train"
    assert set(manifest.files) == {"round_log.csv", "best_checkpoint.npz", "summary.json"}
    assert manifest.config["aggregation_mode"] == "encrypted"


def test_train_is_reproducible(tmp_path, tiny_config_file):
    for name in ("x", "y"):
        args = ("--run-name", name, "--rounds", "2", "--set", "aggregation_mode=plaintext")
        assert _run("train", tiny_config_file, tmp_path, *args) == 0
    first = (tmp_path / "runs" / "x" / "round_log.csv").read_bytes()
    assert first == (tmp_path / "runs" / "y" / "round_log.csv").read_bytes()
    assert pd.read_csv(tmp_path / "runs" / "x" / "round_log.csv")["duration_ms"].eq(0).all()


def test_replaying_a_manifest_reproduces_the_round_log(tmp_path, tiny_config_file):
    args = ("--rounds", "2", "--set", "aggregation_mode=plaintext")
    assert _run("train", tiny_config_file, tmp_path, "--run-name", "original", *args) == 0
    original = tmp_path / "runs" / "original"
    assert main(["train", "--config", str(original / "manifest.json"), "--run-name", "replay"]) == 0
    replay = tmp_path / "runs" / "replay"
    assert (replay / "round_log.csv").read_bytes() == (original / "round_log.csv").read_bytes()
    assert read_manifest(replay / "manifest.json").config["rounds"] == 2


def test_compare_produces_nine_rows(tmp_path, tiny_config_file):
    assert _run("compare", tiny_config_file, tmp_path, "--run-name", "c") == 0
    table = pd.read_csv(tmp_path / "runs" / "c" / "comparison.csv")
    assert len(table) == 9
    assert table["dataset_hash"].nunique() == 1
    assert set(table["model"]) == {"pbcs-prox", "fedprox", "fedavg"}
    assert set(table["loss"]) == {"weighted-nll", "cross-entropy", "focal"}
    assert set(table.loc[table["model"] == "fedavg", "strategy"]) == {"random/none"}
    assert set(table.loc[table["model"] == "pbcs-prox", "strategy"]) == {"pbcs/varying"}


def test_explain_after_train(tmp_path, tiny_config_file):
    assert _run("train", tiny_config_file, tmp_path, "--run-name", "e") == 0
    assert _run("explain", tiny_config_file, tmp_path, "--run-name", "e") == 0
    run_dir = tmp_path / "runs" / "e"
    for label in (0, 1):
        attribution = json.loads((run_dir / f"attribution_class{label}.json").read_text(encoding="utf-8"))
        assert len(attribution["features"]) == 5
        assert attribution["metadata"]["sample_class"] == label
        attention = json.loads((run_dir / f"attention_class{label}.json").read_text(encoding="utf-8"))
        normalized = np.array(attention["normalized"])
        assert normalized.shape == (5, 5)
        assert normalized.min() == -1.0
        assert normalized.max() == 1.0


def test_errors_exit_with_code_two(tmp_path, tiny_config_file, capsys):
    assert _run("train", tiny_config_file, tmp_path, "--set", "roundz=3") == 2
    assert "error=ConfigError" in capsys.readouterr().err

    assert _run("explain", tiny_config_file, tmp_path, "--run-name", "nothing-trained") == 2
    assert "error=ParseError" in capsys.readouterr().err


def _csv_config(tmp_path, tiny_config_file):
    assert _run("generate-data", tiny_config_file, tmp_path, "--run-name", "data") == 0
    data_dir = tmp_path / "runs" / "data"
    settings = {
        **TINY_SETTINGS,
        "client_csvs": [str(data_dir / "client_0.csv"), str(data_dir / "client_1.csv")],
        "test_csv": str(data_dir / "test.csv"),
    }
    path = tmp_path / "csv.yaml"
    path.write_text(yaml.safe_dump(settings), encoding="utf-8")
    return path, data_dir


@pytest.fixture
def read_csv_spy(monkeypatch):
    opened = []
    original = pd.read_csv

    def spy(path, *args, **kwargs):
        opened.append(str(path))
        return original(path, *args, **kwargs)

    monkeypatch.setattr(pd, "read_csv", spy)
    return opened


def test_training_reads_only_the_named_files(tmp_path, tiny_config_file, read_csv_spy):
    config_path, data_dir = _csv_config(tmp_path, tiny_config_file)
    (data_dir / "unrelated.csv").write_text("a,label\n1,0\n", encoding="utf-8")
    read_csv_spy.clear()
    assert _run("train", config_path, tmp_path, "--run-name", "from-csv") == 0
    assert sorted(read_csv_spy) == sorted(str(data_dir / n) for n in ("client_0.csv", "client_1.csv", "test.csv"))


def test_explain_reads_only_its_client(tmp_path, tiny_config_file, read_csv_spy):
    config_path, data_dir = _csv_config(tmp_path, tiny_config_file)
    assert _run("train", config_path, tmp_path, "--run-name", "private") == 0
    read_csv_spy.clear()
    assert _run("explain", config_path, tmp_path, "--run-name", "private", "--set", "explain_client=1") == 0
    assert read_csv_spy == [str(data_dir / "client_1.csv")]


def test_log_file_is_written_to_the_run_directory(tmp_path, tiny_config_file):
    args = ("--run-name", "logged", "--log-level", "INFO", "--set", "log_file=train.log")
    assert _run("train", tiny_config_file, tmp_path, *args) == 0
    text = (tmp_path / "runs" / "logged" / "train.log").read_text(encoding="utf-8")
    assert "training finished" in text
