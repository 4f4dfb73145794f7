"""Turn a dataset recipe into the encoded, oversampled and scaled table experiments use."""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from imputation_lab.data.tabular import (
    encode_target,
    load_csv,
    minmax_scale,
    oversample_minority,
)
from imputation_lab.models.dataset import Dataset, LabelMapping, ScalingParams
from imputation_lab.simulators.scenario_engine import generate_scenario
from imputation_lab.utils.config import DatasetRecipe
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedDataset:
    """A dataset ready for amputation.

    Attributes:
        recipe: The recipe it was built from.
        dataset: Encoded, oversampled and min-max scaled dataset.
        mapping: Target level mapping.
        scaling: Scaling bounds (also attached to dataset).
        dropped_rows: Rows removed because they had missing cells.
    """

    recipe: DatasetRecipe
    dataset: Dataset
    mapping: LabelMapping
    scaling: ScalingParams
    dropped_rows: int = 0


def load_recipe_source(recipe: DatasetRecipe, data_dir: str | Path = ".") -> Dataset:
    """Load the raw table a recipe points to (file or synthetic scenario)."""
    if recipe.synthetic is not None:
        ds = generate_scenario(recipe.synthetic, recipe.synthetic_rows, recipe.synthetic_seed)
    else:
        path = Path(recipe.path)
        if not path.is_absolute():
            path = Path(data_dir) / path
        ds = load_csv(path, recipe.missing_markers, recipe.kinds, name=recipe.name)
    return Dataset(recipe.name, ds.columns, ds.cells, ds.scaling)


def prepare_dataset(recipe: DatasetRecipe, data_dir: str | Path = ".") -> PreparedDataset:
    """Build the experiment-ready dataset for a recipe.

    Steps run in a fixed order: load, drop columns, drop incomplete rows,
    encode target, oversample, min-max scale.

    Args:
        recipe: Dataset recipe.
        data_dir: Base directory for relative recipe paths.

    Returns:
        PreparedDataset: The prepared dataset with its mapping and scaling.

    Raises:
        DataError: If cells are still missing after preparation.
    """
    ds = load_recipe_source(recipe, data_dir)

    if recipe.drop_columns:
        keep = [n for n in ds.column_names if n not in set(recipe.drop_columns)]
        for name in recipe.drop_columns:
            ds.index_of(name)
        ds = ds.select_columns(keep)

    dropped = 0
    incomplete = np.isnan(ds.cells).any(axis=1)
    if incomplete.any():
        if not recipe.drop_incomplete_rows:
            raise DataError(
                f"dataset {recipe.name!r} has {int(incomplete.sum())} incomplete rows "
                "and drop_incomplete_rows is off"
            )
        dropped = int(incomplete.sum())
        logger.warning("Dropping %d incomplete rows from %s", dropped, recipe.name)
        ds = ds.take_rows(np.flatnonzero(~incomplete))

    ds, mapping = encode_target(ds, recipe.target, recipe.positive)
    if recipe.oversample_to is not None:
        ds = oversample_minority(ds, recipe.oversample_to, seed=0)
    ds, scaling = minmax_scale(ds)

    logger.info(
        "Prepared %s: rows=%d, features=%d, positives=%d",
        recipe.name,
        ds.row_count,
        len(ds.feature_indices),
        int(ds.target.sum()),
    )
    return PreparedDataset(recipe, ds, mapping, scaling, dropped)
