"""Column helpers shared by the imputers."""

import numpy as np

from imputation_lab.models.dataset import Dataset
from imputation_lab.utils.errors import DataError


def columns_to_impute(ds: Dataset) -> list[int]:
    """Feature columns with at least one missing cell.

    Raises:
        DataError: If a feature column has no observed cell.
    """
    holes = []
    for j in ds.feature_indices:
        missing = np.isnan(ds.cells[:, j])
        if missing.all() and ds.row_count > 0:
            raise DataError(
                f"column {ds.columns[j].name!r} has no observed cells",
                column=ds.columns[j].name,
            )
        if missing.any():
            holes.append(j)
    return holes


def column_mode(values: np.ndarray) -> float:
    """Most frequent observed value; ties go to the lowest value."""
    present = values[~np.isnan(values)]
    levels, counts = np.unique(present, return_counts=True)
    return float(levels[np.argmax(counts)])


def is_categorical(ds: Dataset, j: int) -> bool:
    return ds.columns[j].kind == "categorical"


def column_center(ds: Dataset, j: int) -> float:
    """Mean of a numeric column or mode of a categorical one, over observed cells."""
    values = ds.cells[:, j]
    if is_categorical(ds, j):
        return column_mode(values)
    return float(np.nanmean(values))


def initial_fill(ds: Dataset, columns: list[int]) -> np.ndarray:
    """Writable copy of the grid with missing cells set to column mean/mode."""
    grid = np.array(ds.cells, copy=True)
    for j in columns:
        missing = np.isnan(grid[:, j])
        grid[missing, j] = column_center(ds, j)
    return grid
