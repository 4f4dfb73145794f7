"""Single-pass deterministic imputers: mean, median, LOCF and interpolation.

Every function fills only the missing feature cells and returns a new
Dataset; discrete columns are rounded to integers in raw units and
categorical columns fall back to their mode where an average makes no sense.
"""

import logging

import numpy as np
import pandas as pd
from scipy.interpolate import BarycentricInterpolator

from imputation_lab.data.tabular import snap_discrete
from imputation_lab.imputers.common import column_mode, columns_to_impute, is_categorical
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.params import INTERPOLATION_DEGREE, InterpolationOrder
from imputation_lab.utils.errors import ConfigError, DataError

logger = logging.getLogger(__name__)


def _fill_with_statistic(ds: Dataset, statistic) -> Dataset:
    grid = np.array(ds.cells, copy=True)
    for j in columns_to_impute(ds):
        values = grid[:, j]
        missing = np.isnan(values)
        if is_categorical(ds, j):
            fill = column_mode(values)
        else:
            fill = float(snap_discrete(ds, j, np.array([statistic(values)]))[0])
        grid[missing, j] = fill
        logger.debug("Column %s: %d cells <- %r", ds.columns[j].name, missing.sum(), fill)
    return ds.with_cells(grid)


def impute_mean(ds: Dataset) -> Dataset:
    """Fill each missing cell with its column's observed mean (mode for categoricals)."""
    return _fill_with_statistic(ds, np.nanmean)


def impute_median(ds: Dataset) -> Dataset:
    """Fill each missing cell with its column's observed median (mode for categoricals)."""
    return _fill_with_statistic(ds, np.nanmedian)


def impute_locf(ds: Dataset) -> Dataset:
    """Carry the last observed value forward down each column.

    Leading gaps with no observation above them take the first observed
    value below.

    Args:
        ds: Dataset with missing cells.

    Returns:
        Dataset: Completed dataset.
    """
    columns = columns_to_impute(ds)
    if not columns:
        return ds
    grid = np.array(ds.cells, copy=True)
    frame = pd.DataFrame(grid[:, columns])
    grid[:, columns] = frame.ffill().bfill().to_numpy(dtype=float)
    return ds.with_cells(grid)


def _local_polynomial(
    knots_x: np.ndarray, knots_y: np.ndarray, x: float, degree: int
) -> float:
    """Value at x of the polynomial through the degree+1 knots nearest to x.

    Knots are ranked by distance to x, ties to the lower index.
    """
    distance = np.abs(knots_x - x)
    nearest = np.lexsort((knots_x, distance))[: degree + 1]
    nearest = np.sort(nearest)
    return float(BarycentricInterpolator(knots_x[nearest], knots_y[nearest])(x))


def _interpolate_column(values: np.ndarray, degree: int) -> np.ndarray:
    observed = ~np.isnan(values)
    knots_x = np.flatnonzero(observed).astype(float)
    knots_y = values[observed]
    holes = np.flatnonzero(~observed)
    out = np.array(values, copy=True)
    if degree == 1:
        # np.interp holds the end values constant outside the knot range
        out[holes] = np.interp(holes.astype(float), knots_x, knots_y)
        return out
    low, high = knots_x[0], knots_x[-1]
    for i in holes:
        if i < low:
            out[i] = knots_y[0]
        elif i > high:
            out[i] = knots_y[-1]
        else:
            out[i] = _local_polynomial(knots_x, knots_y, float(i), degree)
    return out


def impute_interpolate(ds: Dataset, order: InterpolationOrder = "linear") -> Dataset:
    """Interpolate each column over the row index.

    Linear interpolation uses the two bracketing knots; quadratic and cubic
    use the polynomial through the 3 or 4 nearest knots. Cells before the
    first or after the last knot take that knot's value. Categorical columns
    are filled with their mode.

    Args:
        ds: Dataset with missing cells.
        order: Interpolation order.

    Returns:
        Dataset: Completed dataset.

    Raises:
        DataError: If a column has fewer than order+1 observed cells.
        ConfigError: If the order is unknown.
    """
    if order not in INTERPOLATION_DEGREE:
        raise ConfigError(f"unknown interpolation order {order!r}")
    degree = INTERPOLATION_DEGREE[order]
    grid = np.array(ds.cells, copy=True)
    for j in columns_to_impute(ds):
        values = grid[:, j]
        missing = np.isnan(values)
        if is_categorical(ds, j):
            grid[missing, j] = column_mode(values)
            continue
        n_knots = int((~missing).sum())
        if n_knots < degree + 1:
            raise DataError(
                f"column {ds.columns[j].name!r} has {n_knots} observed cells, "
                f"{order} interpolation needs {degree + 1}",
                column=ds.columns[j].name,
            )
        filled = _interpolate_column(values, degree)
        grid[missing, j] = snap_discrete(ds, j, filled[missing])
    return ds.with_cells(grid)
