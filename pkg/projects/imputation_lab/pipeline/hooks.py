"""Lifecycle hooks for observing experiment runs."""

import logging

from imputation_lab.models.experiment import ExperimentKind, ExperimentRecord, ExperimentReport

logger = logging.getLogger(__name__)


class ExperimentHooks:
    """No-op base class; override the callbacks you need.

    Hooks run in the coordinating process, never inside worker processes.
    """

    def on_experiment_start(self, kind: ExperimentKind, total_cells: int) -> None:
        """Called once before the first cell runs."""

    def on_cell_end(
        self, cell: dict[str, object], records: list[ExperimentRecord], done: int, total: int
    ) -> None:
        """Called after each (dataset, rate, seed) cell finishes, in completion order."""

    def on_experiment_end(self, report: ExperimentReport) -> None:
        """Called once with the finished report."""


class LoggingHooks(ExperimentHooks):
    """Hooks that log progress for command-line runs."""

    def on_experiment_start(self, kind: ExperimentKind, total_cells: int) -> None:
        logger.info("Starting %s experiment: %d cells", kind, total_cells)

    def on_cell_end(
        self, cell: dict[str, object], records: list[ExperimentRecord], done: int, total: int
    ) -> None:
        logger.info(
            "[%d/%d] dataset=%s rate=%.2f seed=%s finished (%d records)",
            done,
            total,
            cell["dataset"],
            cell["rate"],
            cell["seed"],
            len(records),
        )

    def on_experiment_end(self, report: ExperimentReport) -> None:
        logger.info(
            "Finished %s experiment: %d records, %d aggregates",
            report.experiment,
            len(report.records),
            len(report.aggregates),
        )
