import pickle
from concurrent.futures import ProcessPoolExecutor

import pandas as pd
import pytest

from imputation_lab.models.experiment import AggregateRow
from imputation_lab.pipeline import experiments
from imputation_lab.pipeline.experiments import (
    CellTask,
    aggregate,
    build_report,
    derive_orderings,
    derive_ratings,
    execute_cells,
    run_ordering,
    run_ordering_cell,
    run_ranking,
)
from imputation_lab.pipeline.hooks import ExperimentHooks
from imputation_lab.pipeline.report import (
    emit_report,
    load_records_csv,
    load_report,
    long_path,
    summary_lines,
)
from imputation_lab.utils.config import experiment_config_from_dict
from imputation_lab.utils.errors import DataError, ExperimentCellError

SMALL = {
    "datasets": [
        {"name": "diab", "synthetic": "diabetes_like", "synthetic_rows": 60, "target": "Outcome"}
    ],
    "rates": [0.1, 0.2],
    "methods": ["mean", "knn", "missforest"],
    "seeds": [0, 1],
    "forest": {"n_trees": 5},
    "missforest": {"max_iter": 2, "forest": {"n_trees": 5}},
    "mice": {"n_chains": 2, "iterations": 2},
    "sfs": {"folds": 3, "forest": {"n_trees": 5}},
    "ordering": {"methods": ["mean", "mice"], "rates": [0.15]},
}


@pytest.fixture(scope="module")
def config():
    return experiment_config_from_dict(SMALL)


@pytest.fixture(scope="module")
def ranking(config):
    return run_ranking(config)


@pytest.fixture(scope="module")
def ordering(config):
    return run_ordering(config)


def _task(config, dataset, experiment="ordering", rate=0.0, methods=("mean",)) -> CellTask:
    return CellTask(
        experiment=experiment,
        dataset=dataset,
        rate=rate,
        seed=0,
        methods=methods,
        settings=config.imputation_settings(),
        classifier=config.classifier_params(),
        sfs=config.sfs_params(),
        test_fraction=config.test_fraction,
    )


class RecordingHooks(ExperimentHooks):
    def __init__(self):
        self.events = []

    def on_experiment_start(self, kind, total_cells):
        self.events.append(("start", kind, total_cells))

    def on_cell_end(self, cell, records, done, total):
        self.events.append(("cell", done, total))

    def on_experiment_end(self, report):
        self.events.append(("end", len(report.records)))


def test_ranking_has_one_record_per_cell_and_method(ranking):
    assert len(ranking.records) == 2 * 3 * 2
    keys = {(r.rate, r.method, r.seed) for r in ranking.records}
    assert len(keys) == 12
    assert all(r.error is not None and r.arm is None for r in ranking.records)


def test_ranking_methods_share_the_mask(ranking):
    by_cell = {}
    for r in ranking.records:
        by_cell.setdefault((r.rate, r.seed), set()).add(
            (r.params["amputation_seed"], r.params["masked_cells"])
        )

    assert all(len(v) == 1 for v in by_cell.values())
    seeds = {next(iter(v))[0] for v in by_cell.values()}
    assert len(seeds) == len(by_cell)


def test_ranking_records_are_sorted(ranking):
    methods = ["mean", "knn", "missforest"]
    order = [(r.rate, methods.index(r.method), r.seed) for r in ranking.records]

    assert order == sorted(order)


def test_ranking_orderings_cover_every_rate_and_metric(ranking):
    assert {(o.rate, o.metric) for o in ranking.orderings} == {
        (0.1, "rmse"),
        (0.1, "mae"),
        (0.2, "rmse"),
        (0.2, "mae"),
    }
    for o in ranking.orderings:
        assert sorted(o.methods) == ["knn", "mean", "missforest"]


def test_aggregates_match_records(ranking):
    rows = [a for a in ranking.aggregates if a.method == "mean" and a.rate == 0.1]
    rmse = [a for a in rows if a.metric == "rmse"][0]
    values = [r.error.rmse for r in ranking.records if r.method == "mean" and r.rate == 0.1]

    assert rmse.n == 2
    assert rmse.mean == pytest.approx(sum(values) / 2)
    assert rmse.sd == pytest.approx(pd.Series(values).std(ddof=1))


def test_ordering_runs_both_arms(ordering):
    assert len(ordering.records) == 1 * 2 * 2 * 2
    arms = {(r.method, r.seed): set() for r in ordering.records}
    for r in ordering.records:
        arms[(r.method, r.seed)].add(r.arm)
        assert r.classification is not None
        assert r.selected_features
    assert all(v == {"impute_then_select", "select_then_impute"} for v in arms.values())
    assert {(r.method, r.compared) for r in ordering.ratings} == {("mean", 4), ("mice", 4)}


def test_rate_zero_makes_arms_identical(config, diabetes_small):
    records = run_ordering_cell(_task(config, diabetes_small))
    first, second = records

    assert first.arm == "impute_then_select"
    assert second.arm == "select_then_impute"
    assert first.selected_features == second.selected_features
    assert first.classification == second.classification


def test_worker_count_does_not_change_results(config, ranking):
    parallel = run_ranking(config, workers=2)

    def key(report):
        return [(r.dataset, r.rate, r.method, r.seed, r.error) for r in report.records]

    assert key(parallel) == key(ranking)


def test_hooks_see_every_cell(config):
    hooks = RecordingHooks()
    run_ranking(config.model_copy(update={"methods": ["mean"]}), hooks=hooks)

    assert hooks.events[0] == ("start", "ranking", 4)
    assert [e for e in hooks.events if e[0] == "cell"][-1] == ("cell", 4, 4)
    assert hooks.events[-1] == ("end", 4)


def test_cell_errors_carry_coordinates(config, diabetes_small):
    # a ranking cell at rate 0 has nothing to score
    task = _task(config, diabetes_small, experiment="ranking")

    with pytest.raises(ExperimentCellError) as info:
        execute_cells([task])

    err = info.value
    assert err.coordinates["dataset"] == diabetes_small.name
    assert err.coordinates["method"] == "mean"
    assert isinstance(err.cause, DataError)
    assert pickle.loads(pickle.dumps(err)).coordinates == err.coordinates


class RecordingPool(ProcessPoolExecutor):
    shutdowns: list[bool] = []

    def shutdown(self, wait=True, *, cancel_futures=False):
        RecordingPool.shutdowns.append(cancel_futures)
        super().shutdown(wait=wait, cancel_futures=cancel_futures)


def test_pool_failure_cancels_queued_cells(config, diabetes_small, monkeypatch):
    monkeypatch.setattr(experiments, "ProcessPoolExecutor", RecordingPool)
    monkeypatch.setattr(RecordingPool, "shutdowns", [])
    task = _task(config, diabetes_small, experiment="ranking")

    with pytest.raises(ExperimentCellError):
        execute_cells([task] * 6, workers=2)

    assert RecordingPool.shutdowns[0] is True


def test_csv_report_round_trip(tmp_path, ranking):
    written = emit_report(ranking, "csv", tmp_path / "ranking.csv")
    back = load_records_csv(written[0])

    assert written[1] == long_path(tmp_path / "ranking.csv")
    assert len(pd.read_csv(written[0])) == len(ranking.records)
    expected = [r.error.rmse for r in ranking.records]
    assert [r.error.rmse for r in back] == pytest.approx(expected)
    assert [r.error.n_cells for r in back] == [r.error.n_cells for r in ranking.records]
    assert len(pd.read_csv(written[1])) == 2 * len(ranking.records)


def test_json_report_round_trip(tmp_path, ordering):
    path, _ = emit_report(ordering, "json", tmp_path / "ordering.json")
    back = load_report(path)

    assert back.aggregates == ordering.aggregates
    assert back.ratings == ordering.ratings
    assert [r.selected_features for r in back.records] == [
        r.selected_features for r in ordering.records
    ]
    assert back.conventions == ordering.conventions


def test_empty_report_is_not_written(tmp_path):
    with pytest.raises(DataError):
        emit_report(build_report("ranking", []), "csv", tmp_path / "x.csv")


def test_summary_lines(ranking, ordering):
    ranking_lines = summary_lines(ranking)
    ordering_lines = summary_lines(ordering)

    assert len(ranking_lines) == 4
    assert all(" < " in line for line in ranking_lines)
    assert all("impute_then_select" in line for line in ordering_lines)


def test_orderings_keep_configured_order_on_ties():
    rows = [
        AggregateRow("d", 0.1, "median", None, "rmse", 0.2, 0.0, 2),
        AggregateRow("d", 0.1, "mean", None, "rmse", 0.2, 0.0, 2),
        AggregateRow("d", 0.1, "knn", None, "rmse", 0.1, 0.0, 2),
    ]

    assert derive_orderings(rows)[0].methods == ["knn", "median", "mean"]


def test_ratings_count_metric_wins():
    rows = []
    means = [
        ("recall", 0.9, 0.8),
        ("precision", 0.7, 0.8),
        ("f1", 0.8, 0.8),
        ("accuracy", 0.9, 0.85),
    ]
    for metric, a, b in means:
        rows.append(AggregateRow("d", 0.15, "mice", "impute_then_select", metric, a, 0.0, 1))
        rows.append(AggregateRow("d", 0.15, "mice", "select_then_impute", metric, b, 0.0, 1))
    rating = derive_ratings(rows)[0]

    assert rating.impute_first_wins == 2
    assert rating.select_first_wins == 1
    assert rating.rating == "2/4"


def test_aggregate_single_seed_has_zero_sd(ranking):
    rows = aggregate(ranking.records[:1])

    assert {a.metric for a in rows} == {"rmse", "mae"}
    assert all(a.sd == 0.0 and a.n == 1 for a in rows)
