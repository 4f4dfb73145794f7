"""Report serialization: record CSV, full JSON and plot-ready long format."""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd

from imputation_lab.models.experiment import (
    AggregateRow,
    ArmRating,
    ExperimentRecord,
    ExperimentReport,
    Ordering,
)
from imputation_lab.models.scores import (
    CLASSIFICATION_METRICS,
    ERROR_METRICS,
    ClassificationScores,
    ErrorScores,
)
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)

ReportFormat = Literal["csv", "json"]

RECORD_COLUMNS: tuple[str, ...] = (
    "experiment",
    "dataset",
    "rate",
    "method",
    "arm",
    "seed",
    "rmse",
    "mae",
    "n_cells",
    "recall",
    "precision",
    "f1",
    "accuracy",
    "selected_features",
    "wall_time_s",
    "version",
    "params",
    "details",
    "column_errors",
)

LONG_COLUMNS: tuple[str, ...] = ("dataset", "rate", "method", "arm", "seed", "metric", "value")


def _jsonable(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _dumps(value) -> str:
    return json.dumps(value, default=_jsonable, sort_keys=True)


def _record_row(record: ExperimentRecord) -> dict[str, object]:
    error = record.error
    scores = record.classification
    return {
        "experiment": record.experiment,
        "dataset": record.dataset,
        "rate": record.rate,
        "method": record.method,
        "arm": record.arm or "",
        "seed": record.seed,
        "rmse": error.rmse if error else "",
        "mae": error.mae if error else "",
        "n_cells": error.n_cells if error else "",
        "recall": scores.recall if scores else "",
        "precision": scores.precision if scores else "",
        "f1": scores.f1 if scores else "",
        "accuracy": scores.accuracy if scores else "",
        "selected_features": ";".join(record.selected_features),
        "wall_time_s": record.wall_time_s,
        "version": record.version,
        "params": _dumps(record.params),
        "details": _dumps(record.details),
        "column_errors": _dumps({k: asdict(v) for k, v in record.column_errors.items()}),
    }


def long_rows(report: ExperimentReport) -> list[dict[str, object]]:
    """One row per (record, metric) for plotting tools."""
    rows = []
    for record in report.records:
        if record.error is not None:
            values = {m: getattr(record.error, m) for m in ERROR_METRICS}
        elif record.classification is not None:
            values = {m: getattr(record.classification, m) for m in CLASSIFICATION_METRICS}
        else:
            values = {}
        for metric, value in values.items():
            rows.append(
                {
                    "dataset": record.dataset,
                    "rate": record.rate,
                    "method": record.method,
                    "arm": record.arm or "",
                    "seed": record.seed,
                    "metric": metric,
                    "value": value,
                }
            )
    return rows


def long_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_long.csv")


def emit_report(report: ExperimentReport, fmt: ReportFormat, path: str | Path) -> list[Path]:
    """Write a report plus its long-format companion.

    CSV holds one row per record in RECORD_COLUMNS order; JSON holds records,
    aggregates, orderings, ratings, config echo and conventions. Both
    formats also write `<stem>_long.csv`.

    Args:
        report: Report to write.
        fmt: "csv" or "json".
        path: Destination path.

    Returns:
        list[Path]: Written files.

    Raises:
        DataError: If the report has no records or the path cannot be written.
    """
    if not report.records:
        raise DataError("refusing to write an empty report")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            frame = pd.DataFrame(
                [_record_row(r) for r in report.records], columns=list(RECORD_COLUMNS)
            )
            frame.to_csv(path, index=False)
        elif fmt == "json":
            with path.open("w", encoding="utf-8") as fh:
                json.dump(asdict(report), fh, default=_jsonable, indent=2)
        else:
            raise DataError(f"unknown report format {fmt!r}")
        long = long_path(path)
        pd.DataFrame(long_rows(report), columns=list(LONG_COLUMNS)).to_csv(long, index=False)
    except OSError as exc:
        raise DataError(f"cannot write report to {path}: {exc}") from exc
    logger.info("Wrote %s report (%d records) to %s and %s", fmt, len(report.records), path, long)
    return [path, long]


def _record_from_dict(data: dict) -> ExperimentRecord:
    error = data.get("error")
    scores = data.get("classification")
    return ExperimentRecord(
        experiment=data["experiment"],
        dataset=data["dataset"],
        rate=float(data["rate"]),
        method=data["method"],
        seed=int(data["seed"]),
        arm=data.get("arm") or None,
        error=ErrorScores(**error) if error else None,
        classification=ClassificationScores(**scores) if scores else None,
        column_errors={k: ErrorScores(**v) for k, v in data.get("column_errors", {}).items()},
        selected_features=list(data.get("selected_features", [])),
        params=data.get("params", {}),
        details=data.get("details", {}),
        wall_time_s=float(data.get("wall_time_s", 0.0)),
        version=data.get("version", ""),
    )


def load_report(path: str | Path) -> ExperimentReport:
    """Reload a JSON report written by emit_report.

    Raises:
        DataError: If the file is missing or not a report.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"report file not found: {path}")
    try:
        with path.open(encoding="utf-8") as fh:
            data = json.load(fh)
        return ExperimentReport(
            experiment=data["experiment"],
            records=[_record_from_dict(r) for r in data["records"]],
            aggregates=[AggregateRow(**a) for a in data.get("aggregates", [])],
            orderings=[Ordering(**o) for o in data.get("orderings", [])],
            ratings=[ArmRating(**r) for r in data.get("ratings", [])],
            config=data.get("config", {}),
            conventions=data.get("conventions", {}),
            version=data.get("version", ""),
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"{path} is not a valid report: {exc}") from exc


def load_records_csv(path: str | Path) -> list[ExperimentRecord]:
    """Reload the records of a CSV report written by emit_report.

    Raises:
        DataError: If the file is missing or lacks the record columns.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"report file not found: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = set(RECORD_COLUMNS) - set(frame.columns)
    if missing:
        raise DataError(f"{path} lacks report columns {sorted(missing)}")

    records = []
    for row in frame.to_dict(orient="records"):
        error = None
        if row["rmse"]:
            error = {
                "rmse": float(row["rmse"]),
                "mae": float(row["mae"]),
                "n_cells": int(row["n_cells"]),
            }
        scores = None
        if row["accuracy"]:
            scores = {m: float(row[m]) for m in CLASSIFICATION_METRICS}
        records.append(
            _record_from_dict(
                {
                    **row,
                    "error": error,
                    "classification": scores,
                    "selected_features": [s for s in row["selected_features"].split(";") if s],
                    "params": json.loads(row["params"] or "{}"),
                    "details": json.loads(row["details"] or "{}"),
                    "column_errors": json.loads(row["column_errors"] or "{}"),
                }
            )
        )
    return records


def summary_lines(report: ExperimentReport) -> list[str]:
    """Human-readable orderings (ranking) or arm ratings (ordering)."""
    lines = [
        f"{o.dataset} rate={o.rate:.2f} {o.metric}: " + " < ".join(o.methods)
        for o in report.orderings
    ]
    lines.extend(
        f"{r.dataset} rate={r.rate:.2f} {r.method}: impute_then_select {r.rating}"
        for r in report.ratings
    )
    return lines
