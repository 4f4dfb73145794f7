from pathlib import Path

import pytest

from imputation_lab.data.recipes import prepare_dataset
from imputation_lab.utils.config import (
    ExperimentConfig,
    experiment_config_from_dict,
    load_config,
    load_experiment_config,
)
from imputation_lab.utils.errors import ConfigError, DataError

CONFIGS = Path(__file__).resolve().parents[1] / "projects" / "imputation_lab" / "configs"


def test_shipped_benchmark_config_loads():
    config = load_experiment_config(CONFIGS / "benchmark.toml")

    assert config.rates == [0.10, 0.15, 0.20, 0.25]
    assert config.seeds == list(range(10))
    assert len(config.methods) == 7
    assert [d.name for d in config.datasets] == ["breast_cancer", "diabetes", "heart"]
    assert config.ordering.methods == ["missforest", "mice"]
    assert config.ordering.rates == [0.15, 0.20]
    assert config.datasets[1].oversample_to == 1000


def test_acceptance_config_keeps_the_benchmark_grid_with_smaller_forests():
    full = load_experiment_config(CONFIGS / "benchmark.toml")
    reduced = load_experiment_config(CONFIGS / "acceptance.toml")

    assert reduced.rates == full.rates
    assert reduced.methods == full.methods
    assert reduced.datasets == full.datasets
    assert reduced.ordering == full.ordering
    assert len(reduced.seeds) < len(full.seeds)
    assert reduced.missforest.forest.n_trees < full.missforest.forest.n_trees


def test_shipped_synthetic_config_loads():
    config = load_experiment_config(CONFIGS / "synthetic.toml")

    assert all(d.synthetic is not None for d in config.datasets)


def test_config_converts_to_params(write_text):
    path = write_text(
        "c.toml",
        """
experiment = "ordering"
seeds = [3]

[knn]
k = 7
weighting = "inverse_distance"

[missforest]
max_iter = 4

[missforest.forest]
n_trees = 12

[sfs]
folds = 4
""",
    )
    config = load_experiment_config(path)
    settings = config.imputation_settings()

    assert config.experiment == "ordering"
    assert settings.knn.k == 7
    assert settings.knn.weighting == "inverse_distance"
    assert settings.missforest.max_iter == 4
    assert settings.missforest.forest.n_trees == 12
    assert config.sfs_params().folds == 4
    assert config.classifier_params().n_trees == 100


def test_defaults_cover_the_full_grid():
    config = ExperimentConfig()

    assert config.rates == [0.10, 0.15, 0.20, 0.25]
    assert config.test_fraction == 0.2
    assert config.imputation_settings().mice.n_chains == 5


@pytest.mark.parametrize(
    "override",
    [
        {"rates": [0.0]},
        {"rates": [1.0]},
        {"rates": []},
        {"seeds": []},
        {"seeds": [1, 1]},
        {"methods": ["hot_deck"]},
        {"knn": {"k": 0}},
        {"unknown_key": 1},
        {"ordering": {"rates": [1.5]}},
        {"datasets": [{"name": "a", "target": "y"}]},
        {"datasets": [{"name": "a", "target": "y", "path": "a.csv", "synthetic": "heart_like"}]},
    ],
)
def test_invalid_configs_raise_config_error(override):
    with pytest.raises(ConfigError):
        experiment_config_from_dict(override)


def test_missing_or_malformed_file(tmp_path, write_text):
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / "nope.toml")
    with pytest.raises(ConfigError):
        load_experiment_config(write_text("bad.toml", "rates = [0.1,\n"))


def test_environment_config(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("IMPUTATION_LAB_CONFIG", "exp.toml")
    monkeypatch.setenv("IMPUTATION_LAB_WORKERS", "4")
    monkeypatch.delenv("IMPUTATION_LAB_DATA_DIR", raising=False)

    config = load_config()

    assert config["config_path"] == "exp.toml"
    assert config["workers"] == 4
    assert config["data_dir"] == "data"


def test_environment_rejects_bad_workers(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("IMPUTATION_LAB_WORKERS", "many")

    with pytest.raises(ConfigError):
        load_config()


def test_recipe_prepares_file_dataset(write_text, tmp_path):
    write_text("d.csv", "id,a,b,label\n1,1.0,5,x\n2,,6,y\n3,3.0,7,x\n4,4.0,9,y\n5,0.5,5,y\n")
    config = experiment_config_from_dict(
        {"datasets": [{"name": "d", "path": "d.csv", "target": "label", "drop_columns": ["id"]}]}
    )
    prepared = prepare_dataset(config.datasets[0], tmp_path)

    assert prepared.dropped_rows == 1
    assert prepared.dataset.column_names == ["a", "b", "label"]
    assert prepared.dataset.row_count == 4
    assert prepared.mapping.positive == "y"
    assert prepared.dataset.cells[:, :2].min() == 0.0
    assert prepared.dataset.cells[:, :2].max() == 1.0


def test_recipe_unknown_drop_column(write_text, tmp_path):
    write_text("d.csv", "a,label\n1,x\n2,y\n")
    config = experiment_config_from_dict(
        {"datasets": [{"name": "d", "path": "d.csv", "target": "label", "drop_columns": ["zz"]}]}
    )

    with pytest.raises(DataError):
        prepare_dataset(config.datasets[0], tmp_path)
