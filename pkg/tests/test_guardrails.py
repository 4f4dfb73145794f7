import numpy as np

from imputation_lab.guardrails.input_validation import validate_experiment_input
from imputation_lab.guardrails.output_quality import validate_imputation_output
from imputation_lab.imputers.simple import impute_mean
from imputation_lab.models.dataset import Dataset


def test_complete_dataset_passes_input_check(tiny):
    assert not validate_experiment_input(tiny).tripwire_triggered


def test_missing_cells_trip_input_check(holey):
    result = validate_experiment_input(holey)

    assert result.tripwire_triggered
    assert "3 missing" in result.output_info


def test_missing_target_trips_input_check(tiny):
    no_target = Dataset("t", tiny.columns[:3], tiny.cells[:, :3])

    assert validate_experiment_input(no_target).tripwire_triggered


def test_small_class_trips_input_check(tiny):
    assert validate_experiment_input(tiny, min_class_rows=4).tripwire_triggered


def test_good_imputation_passes_output_check(holey):
    assert not validate_imputation_output(holey, impute_mean(holey)).tripwire_triggered


def test_leftover_hole_trips_output_check(holey):
    assert validate_imputation_output(holey, holey).tripwire_triggered


def test_changed_observed_cell_trips_output_check(holey):
    cells = np.array(impute_mean(holey).cells, copy=True)
    cells[0, 0] += 1.0
    result = validate_imputation_output(holey, holey.with_cells(cells))

    assert result.tripwire_triggered
    assert "observed" in result.output_info


def test_layout_change_trips_output_check(holey, tiny):
    assert validate_imputation_output(holey, tiny.take_rows([0, 1])).tripwire_triggered
