"""Multiple imputation by chained equations.

Each chain starts from random draws of observed values and then cycles
through the incomplete columns, regressing each on all other features and
replacing its missing cells with perturbed predictions. The chains are
pooled into one completion: the mean across chains for numeric cells and
the mode for categorical cells.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from imputation_lab.data.tabular import snap_discrete
from imputation_lab.imputers.common import column_mode, columns_to_impute, is_categorical
from imputation_lab.imputers.least_squares import fit_least_squares
from imputation_lab.learners.forest import train_forest, tree_predictions
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.params import MiceParams
from imputation_lab.utils.seeding import derive_seed, make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MiceResult:
    """Outcome of a MICE run.

    Attributes:
        dataset: Pooled completion.
        chains: Completion produced by each chain.
        ridge_fallbacks: Column fits that needed the ridge fallback.
    """

    dataset: Dataset
    chains: list[Dataset] = field(default_factory=list)
    ridge_fallbacks: int = 0


def _pmm_draw(
    predicted_observed: np.ndarray,
    observed_values: np.ndarray,
    predicted_missing: np.ndarray,
    donors: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Observed value of a random donor among the closest predictions."""
    donors = min(donors, predicted_observed.size)
    index = np.arange(predicted_observed.size)
    out = np.empty(predicted_missing.size)
    for i, target in enumerate(predicted_missing):
        gap = np.abs(predicted_observed - target)
        pool = np.lexsort((index, gap))[:donors]
        out[i] = observed_values[pool[rng.integers(donors)]]
    return out


def _linear_draw(
    grid: np.ndarray,
    c: int,
    predictors: list[int],
    observed: np.ndarray,
    params: MiceParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, bool]:
    design = np.column_stack([np.ones(grid.shape[0]), grid[:, predictors]])
    y_obs = grid[observed, c]
    fit = fit_least_squares(design[observed], y_obs)
    pred_obs = design[observed] @ fit.coef
    pred_mis = design[~observed] @ fit.coef
    if params.pmm_donors > 0:
        return _pmm_draw(pred_obs, y_obs, pred_mis, params.pmm_donors, rng), fit.used_ridge
    dof = max(int(observed.sum()) - design.shape[1], 1)
    sd = float(np.sqrt(np.sum((y_obs - pred_obs) ** 2) / dof))
    return pred_mis + rng.normal(0.0, sd, size=pred_mis.size), fit.used_ridge


def _forest_draw(
    grid: np.ndarray,
    ds: Dataset,
    c: int,
    predictors: list[int],
    observed: np.ndarray,
    params: MiceParams,
    rng: np.random.Generator,
    seed: int,
) -> np.ndarray:
    task = "classification" if is_categorical(ds, c) else "regression"
    forest = train_forest(
        grid[np.ix_(observed, predictors)],
        grid[observed, c],
        replace(params.forest, seed=seed),
        task,
        n_classes=len(ds.columns[c].levels) or None,
    )
    per_tree = tree_predictions(forest, grid[np.ix_(~observed, predictors)])
    picks = rng.integers(per_tree.shape[0], size=per_tree.shape[1])
    return per_tree[picks, np.arange(per_tree.shape[1])]


def _as_levels(values: np.ndarray, n_levels: int) -> np.ndarray:
    return np.clip(np.floor(values + 0.5), 0, n_levels - 1)


def _run_chain(
    ds: Dataset, chain: int, order: list[int], params: MiceParams
) -> tuple[np.ndarray, int]:
    rng = make_rng(params.seed, "mice", chain)
    missing = np.isnan(ds.cells)
    grid = np.array(ds.cells, copy=True)
    for c in order:
        holes = missing[:, c]
        grid[holes, c] = rng.choice(ds.cells[~holes, c], size=int(holes.sum()))

    features = ds.feature_indices
    ridge = 0
    for iteration in range(1, params.iterations + 1):
        for c in order:
            predictors = [j for j in features if j != c]
            observed = ~missing[:, c]
            if params.regressor == "forest":
                seed = derive_seed(params.seed, "mice", chain, iteration, c)
                draws = _forest_draw(grid, ds, c, predictors, observed, params, rng, seed)
            else:
                draws, used_ridge = _linear_draw(grid, c, predictors, observed, params, rng)
                ridge += int(used_ridge)
            if is_categorical(ds, c):
                draws = _as_levels(draws, len(ds.columns[c].levels))
            grid[~observed, c] = draws
        logger.debug("MICE chain %d finished iteration %d", chain, iteration)
    return grid, ridge


def _snap(ds: Dataset, grid: np.ndarray, order: list[int], missing: np.ndarray) -> np.ndarray:
    for j in order:
        rows = missing[:, j]
        grid[rows, j] = snap_discrete(ds, j, grid[rows, j])
    return grid


def run_mice(ds: Dataset, params: MiceParams | None = None) -> MiceResult:
    """Run MICE and keep every chain's completion.

    Args:
        ds: Dataset with missing feature cells.
        params: Chain count, iterations, regressor, donor pool and seed.

    Returns:
        MiceResult: Pooled completion, per-chain completions and ridge fallback count.

    Raises:
        DataError: If a feature column has no observed cell.
    """
    params = params or MiceParams()
    holes = columns_to_impute(ds)
    if not holes:
        return MiceResult(ds, [ds] * params.n_chains)

    missing = np.isnan(ds.cells)
    order = sorted(holes, key=lambda j: (int(missing[:, j].sum()), j))
    grids, ridge = [], 0
    for chain in range(params.n_chains):
        grid, used = _run_chain(ds, chain, order, params)
        grids.append(grid)
        ridge += used
    if ridge:
        logger.warning("MICE used the ridge fallback in %d column fits", ridge)

    stacked = np.stack(grids)
    pooled = np.array(ds.cells, copy=True)
    for j in order:
        rows = missing[:, j]
        values = stacked[:, rows, j]
        if is_categorical(ds, j):
            pooled[rows, j] = [column_mode(values[:, i]) for i in range(values.shape[1])]
        else:
            pooled[rows, j] = values.mean(axis=0)

    chains = [ds.with_cells(_snap(ds, g, order, missing)) for g in grids]
    result = ds.with_cells(_snap(ds, pooled, order, missing))
    logger.info(
        "MICE pooled %d chains over %d columns (%d cells)",
        params.n_chains,
        len(order),
        int(missing[:, order].sum()),
    )
    return MiceResult(result, chains, ridge)


def impute_mice(ds: Dataset, params: MiceParams | None = None) -> Dataset:
    """Complete a dataset with MICE, pooled across chains."""
    return run_mice(ds, params).dataset
