"""Iterative random-forest imputation.

Missing cells start at the column mean (mode for categoricals). Each sweep
visits the incomplete columns in ascending missing-count order and replaces
their missing cells with forest predictions trained on the rows where the
column is observed. Sweeps stop once the change between successive
completions stops shrinking, and the completion from before that sweep is
returned.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from imputation_lab.data.tabular import snap_discrete
from imputation_lab.imputers.common import columns_to_impute, initial_fill, is_categorical
from imputation_lab.learners.forest import predict, train_forest
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.params import MissForestParams
from imputation_lab.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepStatistics:
    """Change between a sweep's completion and the previous one.

    Attributes:
        sweep: One-based sweep number.
        numeric_change: Squared change of numeric columns over their squared norm,
            None when no numeric column has missing cells.
        categorical_change: Share of categorical missing cells whose level changed,
            None when no categorical column has missing cells.
    """

    sweep: int
    numeric_change: float | None
    categorical_change: float | None


@dataclass(frozen=True)
class MissForestResult:
    """Outcome of a MissForest run.

    Attributes:
        dataset: The returned completion.
        statistics: One entry per sweep run.
        returned_sweep: Sweep whose completion was returned (0 when nothing was missing).
        converged: Whether the stopping rule fired before max_iter.
    """

    dataset: Dataset
    statistics: list[SweepStatistics] = field(default_factory=list)
    returned_sweep: int = 0
    converged: bool = False

    @property
    def sweeps(self) -> int:
        return len(self.statistics)


def _changes(
    ds: Dataset,
    previous: np.ndarray,
    current: np.ndarray,
    numeric: list[int],
    categorical: list[int],
    missing: np.ndarray,
) -> tuple[float | None, float | None]:
    numeric_change = None
    if numeric:
        new, old = current[:, numeric], previous[:, numeric]
        denom = float(np.sum(new**2))
        diff = float(np.sum((new - old) ** 2))
        numeric_change = diff / denom if denom > 0 else diff
    categorical_change = None
    if categorical:
        holes = missing[:, categorical]
        changed = (current[:, categorical] != previous[:, categorical]) & holes
        categorical_change = float(changed.sum()) / float(holes.sum())
    return numeric_change, categorical_change


def _improved(new: float | None, old: float | None) -> bool:
    return new is not None and (old is None or new < old)


def run_missforest(ds: Dataset, params: MissForestParams | None = None) -> MissForestResult:
    """Run MissForest and keep the sweep statistics.

    Args:
        ds: Dataset with missing feature cells.
        params: Sweep cap, forest hyperparameters and seed.

    Returns:
        MissForestResult: Completion plus convergence record.

    Raises:
        DataError: If a feature column has no observed cell.
    """
    params = params or MissForestParams()
    holes = columns_to_impute(ds)
    if not holes:
        return MissForestResult(ds)

    missing = np.isnan(ds.cells)
    order = sorted(holes, key=lambda j: (int(missing[:, j].sum()), j))
    numeric = [j for j in order if not is_categorical(ds, j)]
    categorical = [j for j in order if is_categorical(ds, j)]
    features = ds.feature_indices

    current = initial_fill(ds, holes)
    statistics: list[SweepStatistics] = []
    previous_change: tuple[float | None, float | None] = (None, None)
    returned, returned_sweep, converged = current, 0, False

    for sweep in range(1, params.max_iter + 1):
        before = current.copy()
        for c in order:
            predictors = [j for j in features if j != c]
            observed = ~missing[:, c]
            task = "classification" if is_categorical(ds, c) else "regression"
            forest_params = replace(
                params.forest, seed=derive_seed(params.seed, "missforest", sweep, c)
            )
            forest = train_forest(
                current[np.ix_(observed, predictors)],
                current[observed, c],
                forest_params,
                task,
                n_classes=len(ds.columns[c].levels) or None,
            )
            current[~observed, c] = predict(forest, current[np.ix_(~observed, predictors)])

        change = _changes(ds, before, current, numeric, categorical, missing)
        statistics.append(SweepStatistics(sweep, *change))
        logger.info(
            "MissForest sweep %d: numeric_change=%s, categorical_change=%s",
            sweep,
            change[0],
            change[1],
        )
        if sweep > 1 and not (
            _improved(change[0], previous_change[0])
            or _improved(change[1], previous_change[1])
        ):
            returned, returned_sweep, converged = before, sweep - 1, True
            break
        previous_change = change
        returned, returned_sweep = current, sweep

    grid = np.array(returned, copy=True)
    for j in numeric:
        rows = missing[:, j]
        grid[rows, j] = snap_discrete(ds, j, grid[rows, j])
    return MissForestResult(ds.with_cells(grid), statistics, returned_sweep, converged)


def impute_missforest(ds: Dataset, params: MissForestParams | None = None) -> Dataset:
    """Complete a dataset with MissForest."""
    return run_missforest(ds, params).dataset
