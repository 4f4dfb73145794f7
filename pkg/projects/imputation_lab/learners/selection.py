"""Sequential forward selection wrapped around the forest classifier."""

import logging
from dataclasses import replace

import numpy as np
from sklearn.model_selection import StratifiedKFold

from imputation_lab.evaluation.metrics import score_predictions
from imputation_lab.learners.forest import predict, train_forest
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.experiment import SfsResult, SfsStep
from imputation_lab.models.params import ForestParams
from imputation_lab.utils.errors import ConfigError, DataError
from imputation_lab.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


def _fit_params(params: ForestParams, n_columns: int, seed: int) -> ForestParams:
    mtry = params.mtry if params.mtry is None else min(params.mtry, n_columns)
    return replace(params, mtry=mtry, seed=seed)


def cv_accuracy(
    X: np.ndarray,
    y: np.ndarray,
    forest_params: ForestParams,
    folds: int,
    seed: int,
) -> float:
    """Mean accuracy of the forest classifier over stratified folds.

    Fold assignment and each fold's forest seed derive from seed.

    Args:
        X: Complete feature grid.
        y: Binary labels.
        forest_params: Classifier hyperparameters.
        folds: Number of folds.
        seed: Seed for fold assignment and forests.

    Returns:
        float: Mean fold accuracy.
    """
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    scores = []
    for fold, (train, test) in enumerate(splitter.split(X, y)):
        params = _fit_params(forest_params, X.shape[1], derive_seed(seed, "sfs-fold", fold))
        forest = train_forest(X[train], y[train], params, "classification", n_classes=2)
        scores.append(score_predictions(y[test], predict(forest, X[test])).accuracy)
    return float(np.mean(scores))


def _class_counts(y: np.ndarray) -> np.ndarray:
    return np.bincount(y.astype(int), minlength=2)


def sfs(
    ds: Dataset,
    forest_params: ForestParams,
    folds: int = 5,
    seed: int = 0,
    max_features: int | None = None,
    complete_case: bool = False,
) -> SfsResult:
    """Greedy forward selection by cross-validated accuracy.

    Starting from no columns, each step scores every unselected feature
    added to the current set and keeps the best one (ties to the lower
    column index). Selection stops when no candidate strictly improves the
    incumbent score or max_features columns are selected.

    With complete_case set, each candidate set is scored on the rows that
    have no missing cell in that set; a candidate whose complete rows leave
    a class with fewer rows than folds scores 0.0.

    Args:
        ds: Dataset with a binary target; complete unless complete_case is set.
        forest_params: Classifier hyperparameters.
        folds: Cross-validation folds.
        seed: Seed for folds and forests.
        max_features: Optional cap on selected columns.
        complete_case: Score candidates on complete-case rows.

    Returns:
        SfsResult: Selected columns and the accepted-step trajectory.

    Raises:
        DataError: If there are no features, cells are missing outside
            complete-case mode, or folds exceed the smallest class.
        ConfigError: If folds < 2 or max_features < 1.
    """
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    if max_features is not None and max_features < 1:
        raise ConfigError(f"max_features must be >= 1, got {max_features}")
    features = ds.feature_indices
    if not features:
        raise DataError(f"dataset {ds.name!r} has no feature columns")
    y = ds.target
    if not complete_case:
        if np.isnan(ds.cells[:, features]).any():
            raise DataError(
                f"dataset {ds.name!r} has missing cells; use complete-case mode"
            )
        if _class_counts(y).min() < folds:
            raise DataError(
                f"folds={folds} exceeds the smallest class size {_class_counts(y).min()}"
            )

    observed = ~np.isnan(ds.cells)
    selected: list[int] = []
    trajectory: list[SfsStep] = []
    incumbent = -np.inf
    limit = len(features) if max_features is None else min(max_features, len(features))

    while len(selected) < limit:
        best_score, best_col = -np.inf, None
        for col in features:
            if col in selected:
                continue
            subset = selected + [col]
            rows = observed[:, subset].all(axis=1)
            if _class_counts(y[rows]).min() < folds:
                logger.warning(
                    "Candidate %s has too few complete rows per class (%s); scoring 0",
                    ds.columns[col].name,
                    _class_counts(y[rows]).tolist(),
                )
                score = 0.0
            else:
                score = cv_accuracy(
                    ds.cells[np.ix_(rows, subset)], y[rows], forest_params, folds, seed
                )
            if score > best_score:
                best_score, best_col = score, col

        if best_col is None or best_score <= incumbent:
            break
        selected.append(best_col)
        incumbent = best_score
        trajectory.append(SfsStep(ds.columns[best_col].name, best_score))
        logger.info(
            "SFS step %d: added %s (accuracy %.4f)",
            len(selected),
            ds.columns[best_col].name,
            best_score,
        )

    return SfsResult(
        selected=[ds.columns[j].name for j in selected],
        trajectory=trajectory,
        criterion="accuracy",
        complete_case=complete_case,
    )
