"""Shared fixtures: tiny hand-built tables and small synthetic scenarios."""

import numpy as np
import pytest

from imputation_lab.data.tabular import encode_target, minmax_scale
from imputation_lab.models.dataset import Column, Dataset
from imputation_lab.models.params import ForestParams
from imputation_lab.simulators.scenario_engine import SCENARIOS, generate_scenario


@pytest.fixture
def tiny() -> Dataset:
    """Six rows: continuous, discrete, categorical features and a binary target."""
    columns = (
        Column("x", "continuous"),
        Column("n", "discrete"),
        Column("color", "categorical", ("blue", "green", "red")),
        Column("y", "binary_target"),
    )
    cells = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 0.0, 0.0],
            [2.0, 3.0, 1.0, 0.0],
            [3.0, 4.0, 2.0, 1.0],
            [4.0, 5.0, 2.0, 1.0],
            [5.0, 6.0, 2.0, 1.0],
        ]
    )
    return Dataset("tiny", columns, cells)


@pytest.fixture
def holey(tiny: Dataset) -> Dataset:
    """tiny with three feature cells blanked (one per feature column)."""
    cells = np.array(tiny.cells, copy=True)
    cells[1, 0] = np.nan
    cells[3, 1] = np.nan
    cells[4, 2] = np.nan
    return tiny.with_cells(cells)


def prepared_scenario(name: str, rows: int, seed: int = 0) -> Dataset:
    raw = generate_scenario(name, rows, seed)
    encoded, _ = encode_target(raw, SCENARIOS[name].target)
    scaled, _ = minmax_scale(encoded)
    return scaled


@pytest.fixture
def prepare():
    """Factory for encoded and scaled synthetic scenarios."""
    return prepared_scenario


@pytest.fixture
def diabetes_small() -> Dataset:
    """Encoded and scaled 80-row diabetes-like table (all numeric)."""
    return prepared_scenario("diabetes_like", 80)


@pytest.fixture
def heart_small() -> Dataset:
    """Encoded and scaled 60-row heart-like table (mixed kinds)."""
    return prepared_scenario("heart_like", 60)


@pytest.fixture
def small_forest() -> ForestParams:
    return ForestParams(n_trees=5, seed=3)


@pytest.fixture
def write_text(tmp_path):
    """Write a text file under tmp_path and return its path."""

    def _write(name: str, text: str):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
