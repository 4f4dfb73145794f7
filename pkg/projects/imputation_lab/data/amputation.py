"""MCAR amputation: blank a fixed number of feature cells, keeping ground truth."""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from imputation_lab.models.amputation import AmputationMask
from imputation_lab.models.dataset import Dataset
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)

MAX_REDRAWS = 100


def _blank_count(rate: float, eligible: int) -> int:
    return int(np.floor(rate * eligible + 0.5))


def ampute_mcar(
    ds: Dataset, rate: float, seed: int
) -> tuple[Dataset, AmputationMask]:
    """Blank exactly round(rate * eligible) feature cells uniformly at random.

    Eligible cells are every cell outside the binary-target column. Cells
    are drawn without replacement; a draw that empties a row of all its
    features is rejected and redrawn.

    Args:
        ds: Dataset with no missing feature cells.
        rate: Share of eligible cells to blank, in [0, 1).
        seed: Draw seed.

    Returns:
        tuple[Dataset, AmputationMask]: The amputed dataset and the mask.

    Raises:
        DataError: If feature cells are already missing or no valid draw exists.
    """
    if not 0.0 <= rate < 1.0:
        raise DataError(f"amputation rate must be in [0, 1), got {rate}")
    features = np.asarray(ds.feature_indices, dtype=int)
    block = ds.cells[:, features]
    if np.isnan(block).any():
        raise DataError(f"dataset {ds.name!r} already has missing feature cells")

    n_rows, n_feat = block.shape
    eligible = n_rows * n_feat
    count = _blank_count(rate, eligible)
    if count == 0:
        logger.info("Amputation of %s at rate %.2f blanks no cells", ds.name, rate)
        return ds, AmputationMask.empty(rate, seed)
    if count > eligible - n_rows:
        raise DataError(
            f"cannot blank {count} of {eligible} cells in {ds.name!r} "
            "without emptying a row"
        )

    rng = np.random.default_rng(seed)
    for attempt in range(1, MAX_REDRAWS + 1):
        flat = rng.choice(eligible, size=count, replace=False)
        rows, local = np.divmod(flat, n_feat)
        per_row = np.bincount(rows, minlength=n_rows)
        if not np.any(per_row == n_feat):
            break
        logger.debug("Amputation draw %d emptied a row, redrawing", attempt)
    else:
        raise DataError(
            f"no valid amputation of {ds.name!r} at rate {rate} after {MAX_REDRAWS} draws"
        )

    cols = features[local]
    originals = ds.cells[rows, cols]
    cells = np.array(ds.cells, copy=True)
    cells[rows, cols] = np.nan
    mask = AmputationMask(rows, cols, originals, rate, seed)
    logger.info(
        "Amputed %s: rate=%.2f, seed=%d, blanked=%d of %d cells",
        ds.name,
        rate,
        seed,
        len(mask),
        eligible,
    )
    return ds.with_cells(cells), mask


def restore(ds: Dataset, mask: AmputationMask) -> Dataset:
    """Write the mask's original values back into a dataset.

    Args:
        ds: Amputed or imputed dataset.
        mask: Mask produced against the same row/column layout.

    Returns:
        Dataset: Dataset with every masked cell holding its original value.

    Raises:
        DataError: If a coordinate falls outside the grid.
    """
    if len(mask) == 0:
        return ds
    if mask.rows.max() >= ds.row_count or mask.cols.max() >= ds.col_count:
        raise DataError(
            f"mask coordinate out of bounds for a {ds.row_count}x{ds.col_count} grid"
        )
    cells = np.array(ds.cells, copy=True)
    cells[mask.rows, mask.cols] = mask.originals
    return ds.with_cells(cells)


def write_mask_csv(mask: AmputationMask, ds: Dataset, path: str | Path) -> Path:
    """Write the mask as an audit CSV with header row,column,original_value.

    Args:
        mask: Mask to write.
        ds: Dataset the mask refers to (supplies column names).
        path: Destination path.

    Returns:
        Path: The written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = ds.column_names
    frame = pd.DataFrame(
        {
            "row": mask.rows,
            "column": [names[j] for j in mask.cols],
            "original_value": [repr(float(v)) for v in mask.originals],
        }
    )
    frame.to_csv(path, index=False)
    logger.info("Wrote mask with %d cells to %s", len(mask), path)
    return path


def read_mask_csv(
    path: str | Path, ds: Dataset, rate: float = float("nan"), seed: int = -1
) -> AmputationMask:
    """Read a mask written by write_mask_csv.

    Args:
        path: Mask CSV path.
        ds: Dataset whose column names resolve the column field.
        rate: Rate to attach (not stored in the file).
        seed: Seed to attach (not stored in the file).

    Returns:
        AmputationMask: The reloaded mask.

    Raises:
        DataError: If the file lacks the expected header or names unknown columns.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"mask file not found: {path}")
    frame = pd.read_csv(path, dtype={"row": int, "column": str, "original_value": float})
    missing = {"row", "column", "original_value"} - set(frame.columns)
    if missing:
        raise DataError(f"mask file {path} lacks columns {sorted(missing)}")
    cols = np.array([ds.index_of(name) for name in frame["column"]], dtype=int)
    return AmputationMask(
        frame["row"].to_numpy(dtype=int),
        cols,
        frame["original_value"].to_numpy(dtype=float),
        rate,
        seed,
    )
