import json

import pandas as pd
import pytest

from imputation_lab.main import EXIT_DATA, EXIT_OK, EXIT_USAGE, main

SMALL_TOML = """
rates = [0.1]
methods = ["mean", "locf"]
seeds = [0, 1]

[[datasets]]
name = "heart"
synthetic = "heart_like"
synthetic_rows = 50
target = "target"
"""


@pytest.fixture(autouse=True)
def _isolated(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("IMPUTATION_LAB_CONFIG", raising=False)


@pytest.fixture
def heart_csv(tmp_path):
    path = tmp_path / "heart.csv"
    assert main(["simulate", "--scenario", "heart_like", "--rows", "50", "--out", str(path)]) == 0
    return path


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL_TOML, encoding="utf-8")
    return path


def _ampute(source, out, rate: float, seed: int = 0) -> int:
    args = ["--in", str(source), "--rate", str(rate), "--seed", str(seed)]
    return main(["ampute", *args, "--target", "target", "--out", str(out)])


def test_simulate_writes_scenario(heart_csv):
    frame = pd.read_csv(heart_csv)

    assert len(frame) == 50
    assert "target" in frame.columns


def test_ampute_impute_evaluate_round(tmp_path, heart_csv, capsys):
    holey = tmp_path / "holey.csv"
    mask = tmp_path / "holey_mask.csv"
    full = tmp_path / "full.csv"

    assert _ampute(heart_csv, holey, 0.1, seed=3) == EXIT_OK
    assert mask.exists()
    blanked = len(pd.read_csv(mask))
    assert pd.read_csv(holey).isna().sum().sum() == blanked

    args = ["--in", str(holey), "--method", "mean", "--target", "target"]
    assert main(["impute", *args, "--out", str(full)]) == EXIT_OK
    assert pd.read_csv(full).isna().sum().sum() == 0

    capsys.readouterr()
    args = ["--original", str(heart_csv), "--imputed", str(full), "--mask", str(mask)]
    assert main(["evaluate", *args, "--target", "target"]) == EXIT_OK
    scores = json.loads(capsys.readouterr().out)
    assert scores["n_cells"] == blanked
    assert 0.0 <= scores["mae"] <= scores["rmse"]


def test_evaluate_original_against_itself_is_zero(tmp_path, heart_csv, capsys):
    _ampute(heart_csv, tmp_path / "holey.csv", 0.2)
    capsys.readouterr()

    mask = tmp_path / "holey_mask.csv"
    args = ["--original", str(heart_csv), "--imputed", str(heart_csv), "--mask", str(mask)]
    assert main(["evaluate", *args, "--target", "target"]) == EXIT_OK
    scores = json.loads(capsys.readouterr().out)
    assert scores["rmse"] == 0.0
    assert scores["mae"] == 0.0


def test_ampute_never_blanks_target(tmp_path, heart_csv):
    holey = tmp_path / "holey.csv"
    _ampute(heart_csv, holey, 0.25)

    assert pd.read_csv(holey)["target"].notna().all()


def test_usage_errors_exit_one(heart_csv):
    assert main([]) == EXIT_USAGE
    assert main(["impute", "--method", "mean"]) == EXIT_USAGE
    assert main(["impute", "--in", str(heart_csv), "--method", "hot_deck"]) == EXIT_USAGE
    assert main(["impute", "--in", str(heart_csv), "--method", "mean"]) == EXIT_USAGE
    assert main(["rank"]) == EXIT_USAGE


def test_data_errors_exit_two(tmp_path, heart_csv):
    out = str(tmp_path / "x.csv")
    missing = str(tmp_path / "missing.csv")

    assert main(["impute", "--in", missing, "--method", "mean", "--out", out]) == EXIT_DATA
    assert _ampute(heart_csv, out, 1.5) == EXIT_DATA


def test_bad_config_exits_one(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("rates = [2.0]\n", encoding="utf-8")

    assert main(["rank", "--config", str(bad)]) == EXIT_USAGE


def test_rank_then_report(tmp_path, small_config, capsys):
    records = tmp_path / "rank.csv"

    assert main(["rank", "--config", str(small_config), "--out", str(records)]) == EXIT_OK
    out = capsys.readouterr().out
    assert (tmp_path / "rank_long.csv").exists()
    assert "heart rate=0.10 rmse:" in out
    assert len(pd.read_csv(records)) == 2 * 2

    again = tmp_path / "again.json"
    assert main(["report", "--in", str(records), "--format", "json", "--out", str(again)]) == 0
    report = json.loads(again.read_text(encoding="utf-8"))
    assert report["experiment"] == "ranking"
    assert len(report["aggregates"]) == 2 * 2


def test_seed_override_limits_the_grid(tmp_path, small_config):
    records = tmp_path / "one.csv"

    assert main(["rank", "--config", str(small_config), "--seed", "7", "--out", str(records)]) == 0
    assert set(pd.read_csv(records)["seed"]) == {7}
