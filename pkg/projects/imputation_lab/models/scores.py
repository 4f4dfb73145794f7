"""Score models for imputation error and classification quality."""

from dataclasses import dataclass

from imputation_lab.utils.errors import DataError


@dataclass(frozen=True)
class ErrorScores:
    """Imputation error over the masked cells.

    Attributes:
        rmse: Root mean squared error.
        mae: Mean absolute error.
        n_cells: Number of scored cells.
    """

    rmse: float
    mae: float
    n_cells: int


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion counts with class 1 as positive."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise DataError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationScores:
    """Recall, precision, F1 and accuracy, each in [0, 1]."""

    recall: float
    precision: float
    f1: float
    accuracy: float


CLASSIFICATION_METRICS: tuple[str, ...] = ("recall", "precision", "f1", "accuracy")
ERROR_METRICS: tuple[str, ...] = ("rmse", "mae")
