"""Experiment orchestration for the ranking and ordering studies.

A study is a grid of cells, one per (dataset, rate, seed). Each cell
amputes the prepared dataset once and runs every method (and, for the
ordering study, both arms) on that same mask and split, so methods differ
only in how they impute. Cells run sequentially or on a process pool and
their records are merged in a fixed order, so reports do not depend on
scheduling.
"""

import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from imputation_lab import __version__
from imputation_lab.data.amputation import ampute_mcar
from imputation_lab.data.recipes import PreparedDataset, prepare_dataset
from imputation_lab.data.tabular import stratified_split_indices
from imputation_lab.evaluation.metrics import (
    ZERO_DENOMINATOR_RULE,
    column_errors,
    imputation_error,
    score_predictions,
)
from imputation_lab.guardrails.input_validation import validate_experiment_input
from imputation_lab.guardrails.output_quality import validate_imputation_output
from imputation_lab.imputers.registry import ImputationOutcome, impute
from imputation_lab.learners.forest import predict, train_forest
from imputation_lab.learners.selection import sfs
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.experiment import (
    ARMS,
    AggregateRow,
    Arm,
    ArmRating,
    ExperimentKind,
    ExperimentRecord,
    ExperimentReport,
    Ordering,
)
from imputation_lab.models.params import (
    ForestParams,
    ImputationMethod,
    ImputationSettings,
    SfsParams,
)
from imputation_lab.models.scores import (
    CLASSIFICATION_METRICS,
    ERROR_METRICS,
    ClassificationScores,
)
from imputation_lab.pipeline.hooks import ExperimentHooks
from imputation_lab.utils.config import ExperimentConfig
from imputation_lab.utils.errors import ConfigError, DataError, ExperimentCellError
from imputation_lab.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

CONVENTIONS: dict[str, str] = {
    "missingness": (
        "MCAR, exact cell count round(rate * feature cells), "
        "no row left without features"
    ),
    "error_scale": "rmse/mae on min-max scaled cells; column_errors in raw units",
    "categorical_error": "0/1 mismatch distance",
    "classification_split": "single stratified train/test split per seed",
    "sfs": (
        "cross-validated accuracy, strict improvement stop, "
        "ties to the lower column index"
    ),
    "select_then_impute": "forward selection on complete-case training rows",
    "zero_denominator": ZERO_DENOMINATOR_RULE,
    "mice_pooling": "mean across chains (mode for categorical columns)",
}


@dataclass(frozen=True)
class CellTask:
    """Everything one worker needs to run a (dataset, rate, seed) cell."""

    experiment: ExperimentKind
    dataset: Dataset
    rate: float
    seed: int
    methods: tuple[ImputationMethod, ...]
    settings: ImputationSettings
    classifier: ForestParams
    sfs: SfsParams
    test_fraction: float

    @property
    def coordinates(self) -> dict[str, object]:
        return {
            "experiment": self.experiment,
            "dataset": self.dataset.name,
            "rate": self.rate,
            "seed": self.seed,
        }


def _rate_key(rate: float) -> int:
    return int(round(rate * 10_000))


def cell_seed(dataset: str, rate: float, seed: int, purpose: str) -> int:
    """Seed for one purpose (amputation, split, imputation, ...) inside a cell."""
    return derive_seed(seed, purpose, dataset, _rate_key(rate))


def _impute_checked(
    amputed: Dataset, method: ImputationMethod, task: CellTask
) -> ImputationOutcome:
    outcome = impute(
        amputed,
        task.settings.spec_for(method),
        task.settings,
        seed=cell_seed(task.dataset.name, task.rate, task.seed, "impute"),
    )
    check = validate_imputation_output(amputed, outcome.dataset)
    if check.tripwire_triggered:
        raise DataError(f"{method} imputation failed validation: {check.output_info}")
    return outcome


def run_ranking_cell(task: CellTask) -> list[ExperimentRecord]:
    """Ampute once and score every method's imputation error on the same mask."""
    ds = task.dataset
    amputation_seed = cell_seed(ds.name, task.rate, task.seed, "amputation")
    amputed, mask = ampute_mcar(ds, task.rate, amputation_seed)
    records = []
    for method in task.methods:
        coordinates = {**task.coordinates, "method": method}
        try:
            started = time.perf_counter()
            outcome = _impute_checked(amputed, method, task)
            elapsed = time.perf_counter() - started
            error = imputation_error(ds, outcome.dataset, mask)
            per_column = column_errors(ds, outcome.dataset, mask)
        except Exception as exc:
            raise ExperimentCellError(coordinates, exc) from exc
        records.append(
            ExperimentRecord(
                experiment="ranking",
                dataset=ds.name,
                rate=task.rate,
                method=method,
                seed=task.seed,
                error=error,
                column_errors=per_column,
                params={
                    **outcome.params,
                    "amputation_seed": amputation_seed,
                    "masked_cells": len(mask),
                },
                details=outcome.details,
                wall_time_s=elapsed,
                version=__version__,
            )
        )
    return records


def _fit_and_score(
    ds: Dataset,
    columns: list[str],
    train: np.ndarray,
    test: np.ndarray,
    params: ForestParams,
) -> ClassificationScores:
    idx = [ds.index_of(name) for name in columns]
    mtry = params.mtry if params.mtry is None else min(params.mtry, len(idx))
    forest = train_forest(
        ds.cells[np.ix_(train, idx)],
        ds.target[train],
        replace(params, mtry=mtry),
        "classification",
        n_classes=2,
    )
    return score_predictions(ds.target[test], predict(forest, ds.cells[np.ix_(test, idx)]))


def _run_arm(
    arm: Arm,
    amputed: Dataset,
    method: ImputationMethod,
    train: np.ndarray,
    test: np.ndarray,
    task: CellTask,
) -> ExperimentRecord:
    name, rate, seed = task.dataset.name, task.rate, task.seed
    sfs_seed = cell_seed(name, rate, seed, "sfs")
    classifier = replace(task.classifier, seed=cell_seed(name, rate, seed, "classifier"))
    target = amputed.columns[amputed.target_index].name

    started = time.perf_counter()
    if arm == "impute_then_select":
        outcome = _impute_checked(amputed, method, task)
        completed = outcome.dataset
        selection = sfs(
            completed.take_rows(train),
            task.sfs.forest,
            task.sfs.folds,
            sfs_seed,
            task.sfs.max_features,
        )
    else:
        selection = sfs(
            amputed.take_rows(train),
            task.sfs.forest,
            task.sfs.folds,
            sfs_seed,
            task.sfs.max_features,
            complete_case=True,
        )
        narrowed = amputed.select_columns(selection.selected + [target])
        outcome = _impute_checked(narrowed, method, task)
        completed = outcome.dataset
    scores = _fit_and_score(completed, selection.selected, train, test, classifier)
    elapsed = time.perf_counter() - started

    return ExperimentRecord(
        experiment="ordering",
        dataset=name,
        rate=rate,
        method=method,
        seed=seed,
        arm=arm,
        classification=scores,
        selected_features=list(selection.selected),
        params={
            **outcome.params,
            "sfs": asdict(task.sfs),
            "classifier": asdict(classifier),
            "test_fraction": task.test_fraction,
        },
        details={
            **outcome.details,
            "sfs_trajectory": [asdict(step) for step in selection.trajectory],
            "complete_case": selection.complete_case,
        },
        wall_time_s=elapsed,
        version=__version__,
    )


def run_ordering_cell(task: CellTask) -> list[ExperimentRecord]:
    """Run both arms for every method on one shared mask and train/test split.

    A rate of 0 is accepted here (no cells are blanked), which makes both
    arms see identical data.
    """
    ds = task.dataset
    train, test = stratified_split_indices(
        ds, task.test_fraction, cell_seed(ds.name, task.rate, task.seed, "split")
    )
    amputed, _ = ampute_mcar(
        ds, task.rate, cell_seed(ds.name, task.rate, task.seed, "amputation")
    )
    records = []
    for method in task.methods:
        for arm in ARMS:
            try:
                records.append(_run_arm(arm, amputed, method, train, test, task))
            except Exception as exc:
                coordinates = {**task.coordinates, "method": method, "arm": arm}
                raise ExperimentCellError(coordinates, exc) from exc
    return records


def _run_cell(task: CellTask) -> list[ExperimentRecord]:
    try:
        if task.experiment == "ranking":
            return run_ranking_cell(task)
        return run_ordering_cell(task)
    except ExperimentCellError:
        raise
    except Exception as exc:
        raise ExperimentCellError(task.coordinates, exc) from exc


def _record_key(
    record: ExperimentRecord, datasets: list[str], methods: list[str]
) -> tuple:
    arm = -1 if record.arm is None else ARMS.index(record.arm)
    return (
        datasets.index(record.dataset),
        record.rate,
        methods.index(record.method),
        record.seed,
        arm,
    )


def execute_cells(
    tasks: list[CellTask],
    workers: int = 1,
    hooks: ExperimentHooks | None = None,
) -> list[ExperimentRecord]:
    """Run cells sequentially or on a process pool.

    Returns:
        list[ExperimentRecord]: Records in completion order (callers sort them).

    Raises:
        ExperimentCellError: For the first failing cell; on a pool, queued cells
            are cancelled before it propagates.
    """
    hooks = hooks or ExperimentHooks()
    records: list[ExperimentRecord] = []
    total = len(tasks)
    if workers > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_cell, task): task for task in tasks}
            try:
                for done, future in enumerate(as_completed(futures), start=1):
                    cell_records = future.result()
                    records.extend(cell_records)
                    hooks.on_cell_end(futures[future].coordinates, cell_records, done, total)
            except BaseException:
                pending = sum(not f.done() for f in futures)
                logger.warning("Cell failed, cancelling %d queued cells", pending)
                pool.shutdown(wait=True, cancel_futures=True)
                raise
    else:
        for done, task in enumerate(tasks, start=1):
            cell_records = _run_cell(task)
            records.extend(cell_records)
            hooks.on_cell_end(task.coordinates, cell_records, done, total)
    return records


def _metric_values(record: ExperimentRecord) -> dict[str, float]:
    if record.error is not None:
        return {m: float(getattr(record.error, m)) for m in ERROR_METRICS}
    if record.classification is not None:
        return {m: float(getattr(record.classification, m)) for m in CLASSIFICATION_METRICS}
    return {}


def aggregate(records: list[ExperimentRecord]) -> list[AggregateRow]:
    """Mean and sample standard deviation over seeds.

    Groups are (dataset, rate, method, arm, metric), in order of first
    appearance in the records.
    """
    groups: dict[tuple, list[float]] = defaultdict(list)
    for record in records:
        for metric, value in _metric_values(record).items():
            groups[(record.dataset, record.rate, record.method, record.arm, metric)].append(
                value
            )
    rows = []
    for (dataset, rate, method, arm, metric), values in groups.items():
        arr = np.asarray(values, dtype=float)
        sd = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        rows.append(
            AggregateRow(dataset, rate, method, arm, metric, float(arr.mean()), sd, int(arr.size))
        )
    return rows


def derive_orderings(aggregates: list[AggregateRow]) -> list[Ordering]:
    """Methods sorted by ascending mean error per (dataset, rate, metric).

    Equal means keep the order the methods were configured in.
    """
    groups: dict[tuple, list[AggregateRow]] = defaultdict(list)
    for row in aggregates:
        if row.arm is None and row.metric in ERROR_METRICS:
            groups[(row.dataset, row.rate, row.metric)].append(row)
    orderings = []
    for (dataset, rate, metric), rows in groups.items():
        ranked = sorted(enumerate(rows), key=lambda pair: (pair[1].mean, pair[0]))
        orderings.append(Ordering(dataset, rate, metric, [r.method for _, r in ranked]))
    return orderings


def derive_ratings(aggregates: list[AggregateRow]) -> list[ArmRating]:
    """Count the classification metrics each arm wins per (dataset, rate, method)."""
    means: dict[tuple, dict[str, float]] = defaultdict(dict)
    for row in aggregates:
        if row.arm is not None and row.metric in CLASSIFICATION_METRICS:
            means[(row.dataset, row.rate, row.method, row.arm)][row.metric] = row.mean
    ratings = []
    seen = []
    for dataset, rate, method, _ in means:
        if (dataset, rate, method) not in seen:
            seen.append((dataset, rate, method))
    for dataset, rate, method in seen:
        first = means.get((dataset, rate, method, "impute_then_select"), {})
        second = means.get((dataset, rate, method, "select_then_impute"), {})
        shared = [m for m in CLASSIFICATION_METRICS if m in first and m in second]
        ratings.append(
            ArmRating(
                dataset,
                rate,
                method,
                impute_first_wins=sum(first[m] > second[m] for m in shared),
                select_first_wins=sum(second[m] > first[m] for m in shared),
                compared=len(shared),
            )
        )
    return ratings


def build_report(
    kind: ExperimentKind,
    records: list[ExperimentRecord],
    config: dict[str, object] | None = None,
) -> ExperimentReport:
    """Assemble a report and derive everything that follows from the records."""
    aggregates = aggregate(records)
    return ExperimentReport(
        experiment=kind,
        records=records,
        aggregates=aggregates,
        orderings=derive_orderings(aggregates) if kind == "ranking" else [],
        ratings=derive_ratings(aggregates) if kind == "ordering" else [],
        config=config or {},
        conventions=dict(CONVENTIONS),
        version=__version__,
    )


def prepare_all(
    config: ExperimentConfig, data_dir: str | Path = ".", min_class_rows: int = 2
) -> list[PreparedDataset]:
    """Prepare and validate every dataset recipe in the config.

    Raises:
        ConfigError: If the config names no datasets.
        DataError: If a prepared dataset fails the input guardrail.
    """
    if not config.datasets:
        raise ConfigError("the experiment config names no datasets")
    prepared = []
    for recipe in config.datasets:
        item = prepare_dataset(recipe, data_dir)
        check = validate_experiment_input(item.dataset, min_class_rows)
        if check.tripwire_triggered:
            raise DataError(check.output_info)
        prepared.append(item)
    return prepared


def _run_study(
    kind: ExperimentKind,
    config: ExperimentConfig,
    data_dir: str | Path,
    hooks: ExperimentHooks | None,
    workers: int | None,
) -> ExperimentReport:
    hooks = hooks or ExperimentHooks()
    min_rows = config.sfs.folds if kind == "ordering" else 2
    prepared = prepare_all(config, data_dir, min_rows)
    if kind == "ranking":
        methods, rates = list(config.methods), list(config.rates)
    else:
        methods, rates = list(config.ordering.methods), list(config.ordering.rates)

    tasks = [
        CellTask(
            experiment=kind,
            dataset=item.dataset,
            rate=rate,
            seed=seed,
            methods=tuple(methods),
            settings=config.imputation_settings(),
            classifier=config.classifier_params(),
            sfs=config.sfs_params(),
            test_fraction=config.test_fraction,
        )
        for item in prepared
        for rate in rates
        for seed in config.seeds
    ]
    hooks.on_experiment_start(kind, len(tasks))
    records = execute_cells(tasks, workers or config.workers, hooks)

    names = [item.dataset.name for item in prepared]
    records.sort(key=lambda r: _record_key(r, names, methods))
    report = build_report(kind, records, config.model_dump(mode="json"))
    hooks.on_experiment_end(report)
    return report


def run_ranking(
    config: ExperimentConfig,
    data_dir: str | Path = ".",
    hooks: ExperimentHooks | None = None,
    workers: int | None = None,
) -> ExperimentReport:
    """Imputation-error study: every method on every (dataset, rate, seed) mask.

    Args:
        config: Validated experiment configuration.
        data_dir: Base directory for relative dataset paths.
        hooks: Optional lifecycle hooks.
        workers: Process count, defaults to config.workers.

    Returns:
        ExperimentReport: One record per (dataset, rate, method, seed) with
            aggregates and per-(dataset, rate, metric) method orderings.

    Raises:
        ExperimentCellError: If any cell fails, tagged with its coordinates.
    """
    return _run_study("ranking", config, data_dir, hooks, workers)


def run_ordering(
    config: ExperimentConfig,
    data_dir: str | Path = ".",
    hooks: ExperimentHooks | None = None,
    workers: int | None = None,
) -> ExperimentReport:
    """Selection-order study: impute-then-select against select-then-impute.

    Uses config.ordering.methods and config.ordering.rates. Both arms share
    the mask and the train/test split of their cell.

    Returns:
        ExperimentReport: One record per (dataset, rate, method, seed, arm) with
            aggregates and per-(dataset, rate, method) arm ratings.
    """
    return _run_study("ordering", config, data_dir, hooks, workers)
