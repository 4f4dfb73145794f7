"""Imputation-error and classification metrics."""

import logging

import numpy as np
from sklearn.metrics import confusion_matrix

from imputation_lab.models.amputation import AmputationMask
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.scores import ClassificationScores, ConfusionMatrix, ErrorScores
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)

ZERO_DENOMINATOR_RULE = (
    "recall and precision are 0 when their denominator is 0; "
    "f1 is 0 when recall + precision is 0"
)


def _error_scores(diff: np.ndarray) -> ErrorScores:
    return ErrorScores(
        rmse=float(np.sqrt(np.mean(diff**2))),
        mae=float(np.mean(np.abs(diff))),
        n_cells=int(diff.size),
    )


def _masked_differences(
    imputed: Dataset, mask: AmputationMask, originals: np.ndarray
) -> np.ndarray:
    if len(mask) == 0:
        raise DataError("cannot score an empty mask")
    if mask.rows.max() >= imputed.row_count or mask.cols.max() >= imputed.col_count:
        raise DataError("mask coordinates fall outside the imputed dataset")
    values = imputed.cells[mask.rows, mask.cols]
    if np.isnan(values).any():
        raise DataError("imputed dataset still has missing cells under the mask")
    diff = values - originals
    categorical = np.array([imputed.columns[j].kind == "categorical" for j in mask.cols])
    return np.where(categorical, (values != originals).astype(float), diff)


def imputation_error(
    original: Dataset, imputed: Dataset, mask: AmputationMask
) -> ErrorScores:
    """RMSE and MAE over exactly the masked cells.

    Categorical cells contribute a 0/1 mismatch distance.

    Args:
        original: Dataset before amputation.
        imputed: Completed dataset, same layout.
        mask: Cells that were blanked.

    Returns:
        ErrorScores: rmse, mae and the number of scored cells.

    Raises:
        DataError: If the mask is empty or a masked cell is still missing.
    """
    originals = original.cells[mask.rows, mask.cols]
    return _error_scores(_masked_differences(imputed, mask, originals))


def column_errors(
    original: Dataset, imputed: Dataset, mask: AmputationMask
) -> dict[str, ErrorScores]:
    """Per-column RMSE and MAE over the masked cells, in raw units.

    Scaled numeric columns are mapped back through the original's scaling
    before differencing.
    """
    diff = _masked_differences(imputed, mask, original.cells[mask.rows, mask.cols])
    scaling = original.scaling
    out: dict[str, ErrorScores] = {}
    for j in np.unique(mask.cols):
        name = original.columns[j].name
        pick = mask.cols == j
        part = diff[pick]
        if scaling is not None and name in scaling.bounds:
            low, high = scaling.bounds[name]
            part = part * (high - low)
        out[name] = _error_scores(part)
    return out


def _as_labels(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isin(arr, (0.0, 1.0))):
        raise DataError(f"{name} must contain only 0 and 1")
    return arr.astype(int)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Binary confusion counts with class 1 as positive.

    Raises:
        DataError: If lengths differ, are zero, or a value is not 0/1.
    """
    truth = _as_labels(y_true, "y_true")
    pred = _as_labels(y_pred, "y_pred")
    if truth.size != pred.size:
        raise DataError(f"label lengths differ: {truth.size} vs {pred.size}")
    if truth.size == 0:
        raise DataError("cannot build a confusion matrix from no labels")
    (tn, fp), (fn, tp) = confusion_matrix(truth, pred, labels=[0, 1])
    return ConfusionMatrix(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def classification_scores(cm: ConfusionMatrix) -> ClassificationScores:
    """Recall, precision, F1 and accuracy from confusion counts.

    Zero denominators give 0 (see ZERO_DENOMINATOR_RULE).

    Raises:
        DataError: If the matrix is empty.
    """
    if cm.total == 0:
        raise DataError("confusion matrix has no predictions")
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    f1 = _ratio(2 * recall * precision, recall + precision)
    accuracy = (cm.tp + cm.tn) / cm.total
    return ClassificationScores(recall, precision, f1, accuracy)


def score_predictions(y_true, y_pred) -> ClassificationScores:
    """classification_scores(confusion(y_true, y_pred))."""
    return classification_scores(confusion(y_true, y_pred))
