import numpy as np
import pytest

from imputation_lab.imputers.simple import (
    impute_interpolate,
    impute_locf,
    impute_mean,
    impute_median,
)
from imputation_lab.models.dataset import Column, Dataset
from imputation_lab.utils.errors import ConfigError, DataError


def _column(values, kind="continuous") -> Dataset:
    return Dataset("col", (Column("v", kind),), np.array(values, dtype=float).reshape(-1, 1))


def test_mean_fills_with_observed_mean(holey):
    out = impute_mean(holey)

    assert out.cells[1, 0] == pytest.approx(2.8)
    # discrete mean 3.4 rounds to 3, categorical ties go to the lowest level
    assert out.cells[3, 1] == 3.0
    assert out.cells[4, 2] == 0.0
    assert out.missing_count() == 0


def test_median_fills_with_observed_median(holey):
    out = impute_median(holey)

    assert out.cells[1, 0] == 3.0
    assert out.cells[3, 1] == 3.0
    assert out.cells[4, 2] == 0.0


def test_locf_carries_previous_value(holey):
    out = impute_locf(holey)

    assert out.cells[1, 0] == 0.0
    assert out.cells[3, 1] == 3.0
    assert out.cells[4, 2] == 2.0


def test_locf_backfills_leading_gap():
    out = impute_locf(_column([np.nan, np.nan, 4.0, np.nan]))

    assert out.cells[:, 0].tolist() == [4.0, 4.0, 4.0, 4.0]


def test_linear_interpolation_between_knots(holey):
    out = impute_interpolate(holey, "linear")

    assert out.cells[1, 0] == pytest.approx(1.0)
    assert out.cells[3, 1] == 4.0
    assert out.cells[4, 2] == 0.0


def test_interpolation_holds_end_values():
    out = impute_interpolate(_column([np.nan, 2.0, 5.0, np.nan]), "linear")

    assert out.cells[:, 0].tolist() == [2.0, 2.0, 5.0, 5.0]


@pytest.mark.parametrize("order", ["quadratic", "cubic"])
def test_polynomial_interpolation_recovers_polynomial(order):
    x = np.arange(8, dtype=float)
    values = x**2
    values[[3, 5]] = np.nan
    out = impute_interpolate(_column(values), order)

    assert out.cells[3, 0] == pytest.approx(9.0)
    assert out.cells[5, 0] == pytest.approx(25.0)


def test_interpolation_needs_enough_knots():
    with pytest.raises(DataError):
        impute_interpolate(_column([np.nan, 1.0, np.nan]), "linear")


def test_interpolation_rejects_unknown_order(holey):
    with pytest.raises(ConfigError):
        impute_interpolate(holey, "quintic")


def test_all_missing_column_is_an_error():
    with pytest.raises(DataError):
        impute_mean(_column([np.nan, np.nan]))


def test_complete_dataset_is_returned_unchanged(tiny):
    for imputer in (impute_mean, impute_median, impute_locf, impute_interpolate):
        assert imputer(tiny).equals(tiny)


def test_median_handles_odd_and_even_counts():
    assert impute_median(_column([1.0, np.nan, 100.0, 2.0])).cells[1, 0] == 2.0
    assert impute_median(_column([1.0, 2.0, 3.0, 4.0, np.nan])).cells[4, 0] == 2.5


def test_median_resists_outliers_where_mean_does_not():
    values = [1.0, 2.0, 1000.0, np.nan]

    assert impute_median(_column(values)).cells[3, 0] == 2.0
    assert impute_mean(_column(values)).cells[3, 0] == pytest.approx(1003.0 / 3.0)


@pytest.mark.parametrize("imputer", [impute_mean, impute_median, impute_locf])
def test_fills_stay_inside_observed_range(diabetes_small, imputer):
    cells = np.array(diabetes_small.cells, copy=True)
    cells[::3, 0] = np.nan
    out = imputer(diabetes_small.with_cells(cells))
    observed = cells[~np.isnan(cells[:, 0]), 0]

    assert out.cells[:, 0].min() >= observed.min()
    assert out.cells[:, 0].max() <= observed.max()


def test_mean_fill_keeps_the_column_mean():
    values = np.random.default_rng(3).uniform(0, 1, 50)
    values[[2, 11, 17, 30, 44]] = np.nan
    out = impute_mean(_column(values))

    assert out.cells[:, 0].mean() == pytest.approx(np.nanmean(values), abs=1e-12)


def test_mean_fill_rounds_discrete_columns():
    # 5 / 3 rounds to 2
    out = impute_mean(_column([1.0, np.nan, 2.0, 2.0], kind="discrete"))

    assert out.cells[1, 0] == 2.0
