import numpy as np
import pytest

from imputation_lab.data.tabular import encode_target
from imputation_lab.simulators.scenario_engine import SCENARIOS, generate_scenario, list_scenarios
from imputation_lab.utils.errors import ConfigError


@pytest.mark.parametrize(
    "name, rows",
    [("breast_cancer_like", 569), ("diabetes_like", 768), ("heart_like", 303)],
)
def test_default_shapes_mimic_benchmark_tables(name, rows):
    ds = generate_scenario(name)

    assert ds.row_count == rows
    assert ds.missing_count() == 0
    assert SCENARIOS[name].target in ds.column_names


def test_diabetes_prevalence_is_exact():
    ds, _ = encode_target(generate_scenario("diabetes_like"), "Outcome")

    assert int(ds.target.sum()) == 268


def test_breast_cancer_levels():
    ds, mapping = encode_target(generate_scenario("breast_cancer_like", 100), "diagnosis")

    assert mapping.positive == "M"
    assert set(np.unique(ds.target).tolist()) == {0, 1}


def test_heart_mixes_column_kinds():
    kinds = {c.kind for c in generate_scenario("heart_like", 50).columns}

    assert {"continuous", "discrete", "categorical"} <= kinds


def test_generation_is_seeded():
    first = generate_scenario("heart_like", 40, seed=1)

    assert first.equals(generate_scenario("heart_like", 40, seed=1))
    assert not first.equals(generate_scenario("heart_like", 40, seed=2))


def test_scenario_listing():
    listed = {s["name"]: s for s in list_scenarios()}

    assert listed["diabetes_like"]["columns"] == len(generate_scenario("diabetes_like", 20).columns)


def test_bad_scenarios_are_config_errors():
    with pytest.raises(ConfigError):
        generate_scenario("titanic_like")
    with pytest.raises(ConfigError):
        generate_scenario("heart_like", 5)
