"""Nearest-neighbour imputation under a missing-tolerant distance."""

import logging

import numpy as np

from imputation_lab.data.tabular import snap_discrete
from imputation_lab.imputers.common import column_center, columns_to_impute
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.params import KnnParams
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)


def partial_distances(
    features: np.ndarray,
    row: int,
    categorical: np.ndarray,
    distance: str = "euclidean",
) -> np.ndarray:
    """Distance from one row to every row over commonly observed columns.

    The partial sum is rescaled by (column count / shared column count).
    Categorical columns contribute 0 on a match and 1 on a mismatch. Rows
    sharing no observed column, and the row itself, get an infinite distance.

    Args:
        features: Feature grid with NaN for missing cells.
        row: Index of the query row.
        categorical: Boolean flag per feature column.
        distance: "euclidean" or "manhattan".

    Returns:
        np.ndarray: Distance to each row.
    """
    observed = ~np.isnan(features)
    shared = observed & observed[row]
    diff = np.where(shared, features - np.where(observed[row], features[row], 0.0), 0.0)
    diff = np.where(categorical, (diff != 0).astype(float), np.abs(diff))
    if distance == "euclidean":
        diff = diff**2
    n_shared = shared.sum(axis=1)
    total = features.shape[1] * diff.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(n_shared > 0, total / np.maximum(n_shared, 1), np.inf)
    out = np.sqrt(scaled) if distance == "euclidean" else scaled
    out[row] = np.inf
    return out


def _weights(dist: np.ndarray, weighting: str) -> np.ndarray:
    if weighting == "uniform":
        return np.ones_like(dist)
    zero = dist == 0.0
    if zero.any():
        return zero.astype(float)
    return 1.0 / dist


def impute_knn(ds: Dataset, params: KnnParams | None = None) -> Dataset:
    """Fill each missing cell from the k nearest rows observing its column.

    Numeric cells take the (weighted) mean of the neighbours' values and
    categorical cells their (weighted) mode. Distance ties break toward the
    lower row index. With no candidate neighbour the column mean or mode is
    used.

    Args:
        ds: Min-max scaled dataset with missing cells.
        params: Neighbour count, distance and weighting.

    Returns:
        Dataset: Completed dataset.

    Raises:
        DataError: If a column has no observed cell or a row no observed feature.
    """
    params = params or KnnParams()
    targets = columns_to_impute(ds)
    if not targets:
        return ds

    feature_idx = np.asarray(ds.feature_indices, dtype=int)
    features = ds.cells[:, feature_idx]
    observed = ~np.isnan(features)
    empty_rows = np.flatnonzero(~observed.any(axis=1))
    if empty_rows.size:
        raise DataError(
            f"row {int(empty_rows[0])} of {ds.name!r} has no observed feature",
            row=int(empty_rows[0]),
        )
    categorical = np.array([ds.columns[j].kind == "categorical" for j in feature_idx])
    local_of = {int(j): i for i, j in enumerate(feature_idx)}
    rows_index = np.arange(ds.row_count)

    grid = np.array(ds.cells, copy=True)
    fallbacks = 0
    for r in np.flatnonzero((~observed).any(axis=1)):
        dist = partial_distances(features, int(r), categorical, params.distance)
        for c in targets:
            local = local_of[c]
            if observed[r, local]:
                continue
            candidates = observed[:, local] & np.isfinite(dist)
            if not candidates.any():
                grid[r, c] = snap_discrete(ds, c, np.array([column_center(ds, c)]))[0]
                fallbacks += 1
                continue
            pool = rows_index[candidates]
            order = np.lexsort((pool, dist[pool]))[: params.k]
            neighbours = pool[order]
            values = features[neighbours, local]
            weights = _weights(dist[neighbours], params.weighting)
            if categorical[local]:
                levels = np.unique(values)
                votes = np.array([weights[values == lvl].sum() for lvl in levels])
                grid[r, c] = levels[np.argmax(votes)]
            else:
                mean = float(np.average(values, weights=weights))
                grid[r, c] = snap_discrete(ds, c, np.array([mean]))[0]

    if fallbacks:
        logger.info("KNN used the column fallback for %d cells", fallbacks)
    return ds.with_cells(grid)
