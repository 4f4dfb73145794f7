import numpy as np
import pytest

from imputation_lab.data.tabular import minmax_scale
from imputation_lab.evaluation.metrics import (
    classification_scores,
    column_errors,
    confusion,
    imputation_error,
    score_predictions,
)
from imputation_lab.models.amputation import AmputationMask
from imputation_lab.models.dataset import Column, Dataset
from imputation_lab.models.scores import ConfusionMatrix
from imputation_lab.utils.errors import DataError


def _mask_of(ds: Dataset, coords: list[tuple[int, int]]) -> AmputationMask:
    rows = np.array([r for r, _ in coords])
    cols = np.array([c for _, c in coords])
    return AmputationMask(rows, cols, ds.cells[rows, cols], rate=0.1, seed=0)


def _single(values) -> Dataset:
    return Dataset("s", (Column("v", "continuous"),), np.array(values, dtype=float)[:, None])


def test_imputation_error_by_hand():
    original = _single([0.0, 0.5, 1.0])
    imputed = _single([0.1, 0.5, 0.7])
    scores = imputation_error(original, imputed, _mask_of(original, [(0, 0), (2, 0)]))

    assert scores.rmse == pytest.approx(np.sqrt(0.05))
    assert scores.mae == pytest.approx(0.2)
    assert scores.n_cells == 2


def test_unmasked_differences_are_ignored():
    original = _single([0.0, 0.5, 1.0])
    imputed = _single([0.0, 0.9, 1.0])
    scores = imputation_error(original, imputed, _mask_of(original, [(0, 0), (2, 0)]))

    assert scores.rmse == 0.0


def test_categorical_cells_score_mismatch(tiny):
    cells = np.array(tiny.cells, copy=True)
    cells[0, 2] = 2.0
    scores = imputation_error(tiny, tiny.with_cells(cells), _mask_of(tiny, [(0, 2), (3, 2)]))

    assert scores.mae == pytest.approx(0.5)
    assert scores.rmse == pytest.approx(np.sqrt(0.5))


@pytest.mark.parametrize("seed", range(5))
def test_imputation_error_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    original = Dataset(
        "r",
        tuple(Column(f"c{j}", "continuous") for j in range(4)),
        rng.uniform(size=(30, 4)),
    )
    imputed = original.with_cells(original.cells + rng.normal(0, 0.2, size=(30, 4)))
    flat = rng.choice(120, size=25, replace=False)
    coords = [(int(i // 4), int(i % 4)) for i in flat]
    scores = imputation_error(original, imputed, _mask_of(original, coords))

    squared, absolute = 0.0, 0.0
    for r, c in coords:
        gap = imputed.cells[r, c] - original.cells[r, c]
        squared += gap * gap
        absolute += abs(gap)

    assert scores.rmse == pytest.approx(np.sqrt(squared / len(coords)))
    assert scores.mae == pytest.approx(absolute / len(coords))
    assert scores.mae <= scores.rmse + 1e-12


def test_empty_mask_is_rejected(tiny):
    with pytest.raises(DataError):
        imputation_error(tiny, tiny, AmputationMask.empty())


def test_masked_cell_still_missing_is_rejected(tiny, holey):
    with pytest.raises(DataError):
        imputation_error(tiny, holey, _mask_of(tiny, [(1, 0)]))


def test_column_errors_report_raw_units(tiny):
    scaled, _ = minmax_scale(tiny)
    cells = np.array(scaled.cells, copy=True)
    cells[2, 0] += 0.2  # one fifth of the 0..5 range
    errors = column_errors(scaled, scaled.with_cells(cells), _mask_of(scaled, [(2, 0), (2, 1)]))

    assert errors["x"].mae == pytest.approx(1.0)
    assert errors["n"].mae == 0.0


def test_confusion_counts():
    cm = confusion([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])

    assert (cm.tp, cm.fn, cm.tn, cm.fp) == (2, 1, 1, 1)


def test_classification_scores_by_hand():
    scores = score_predictions([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])

    assert scores.recall == pytest.approx(2 / 3)
    assert scores.precision == pytest.approx(2 / 3)
    assert scores.f1 == pytest.approx(2 / 3)
    assert scores.accuracy == pytest.approx(3 / 5)


def test_zero_denominators_give_zero():
    scores = classification_scores(ConfusionMatrix(tp=0, fp=0, tn=4, fn=2))

    assert scores.precision == 0.0
    assert scores.recall == 0.0
    assert scores.f1 == 0.0
    assert scores.accuracy == pytest.approx(4 / 6)


def test_classification_inputs_are_validated():
    with pytest.raises(DataError):
        confusion([0, 1, 2], [0, 1, 1])
    with pytest.raises(DataError):
        confusion([0, 1], [0])
    with pytest.raises(DataError):
        confusion([], [])
    with pytest.raises(DataError):
        classification_scores(ConfusionMatrix(0, 0, 0, 0))


def test_classification_scores_match_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(200):
        size = int(rng.integers(1, 30))
        truth = rng.integers(0, 2, size)
        pred = rng.integers(0, 2, size)
        tp = fp = tn = fn = 0
        for t, p in zip(truth, pred):
            if t and p:
                tp += 1
            elif p:
                fp += 1
            elif t:
                fn += 1
            else:
                tn += 1
        recall = tp / (tp + fn) if tp + fn else 0.0
        precision = tp / (tp + fp) if tp + fp else 0.0
        f1 = 2 * recall * precision / (recall + precision) if recall + precision else 0.0
        scores = score_predictions(truth, pred)

        assert scores.recall == pytest.approx(recall, abs=1e-12)
        assert scores.precision == pytest.approx(precision, abs=1e-12)
        assert scores.f1 == pytest.approx(f1, abs=1e-12)
        assert scores.accuracy == pytest.approx((tp + tn) / size, abs=1e-12)
