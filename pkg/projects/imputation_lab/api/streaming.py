"""SSE streaming infrastructure for the experiment API.

Provides ExperimentHooks that push progress events to an asyncio.Queue from
the worker thread running a study, an SSE event generator, and in-memory
run state that keeps at most MAX_FINISHED_RUNS finished runs.
"""

import asyncio
import json
import logging
import uuid
from dataclasses import dataclass, field

from imputation_lab.api.schemas.experiment import RunStatus
from imputation_lab.models.experiment import ExperimentKind, ExperimentRecord, ExperimentReport
from imputation_lab.pipeline.hooks import ExperimentHooks
from imputation_lab.simulators.scenario_engine import ScenarioType

logger = logging.getLogger(__name__)


@dataclass
class RunState:
    """In-memory state for a single experiment run.

    Attributes:
        run_id: Unique run identifier.
        experiment: Study kind.
        scenario_type: The synthetic scenario the study runs on.
        status: Current run status.
        queue: Async queue for SSE events.
        report: Finished report once completed.
        cells_done: Cells finished so far.
        cells_total: Total cells of the run.
        error: Failure message once failed.
    """

    run_id: str
    experiment: ExperimentKind
    scenario_type: ScenarioType
    status: RunStatus = "pending"
    queue: asyncio.Queue = field(default_factory=asyncio.Queue)
    report: ExperimentReport | None = None
    cells_done: int = 0
    cells_total: int = 0
    error: str = ""


MAX_FINISHED_RUNS = 64

_runs: dict[str, RunState] = {}


def _evict_finished_runs() -> None:
    """Drop the oldest completed or failed runs beyond MAX_FINISHED_RUNS."""
    finished = [rid for rid, s in _runs.items() if s.status in ("completed", "failed")]
    for run_id in finished[: max(0, len(finished) - MAX_FINISHED_RUNS)]:
        del _runs[run_id]
        logger.debug("Evicted finished run %s", run_id)


def create_run(experiment: ExperimentKind, scenario_type: ScenarioType) -> RunState:
    """Create a new run state and register it.

    Args:
        experiment: Study kind.
        scenario_type: Synthetic scenario to run on.

    Returns:
        RunState: The newly created run state.
    """
    _evict_finished_runs()
    run_id = uuid.uuid4().hex[:12]
    state = RunState(run_id=run_id, experiment=experiment, scenario_type=scenario_type)
    _runs[run_id] = state
    logger.info(
        "Created run: run_id=%s, experiment=%s, scenario_type=%s",
        run_id,
        experiment,
        scenario_type,
    )
    return state


def get_run(run_id: str) -> RunState | None:
    """Look up a run by ID, None if unknown."""
    return _runs.get(run_id)


def _sse_line(event: str, data: dict) -> str:
    """Format a single SSE message.

    Args:
        event: The event type name.
        data: The JSON-serializable payload.

    Returns:
        str: SSE-formatted string.
    """
    return f"event: {event}\ndata: {json.dumps(data)}\n\n"


class StreamingExperimentHooks(ExperimentHooks):
    """ExperimentHooks that forward progress to an SSE queue.

    Callbacks fire on the worker thread running the study, so events are
    handed to the event loop with call_soon_threadsafe.

    Args:
        state: The RunState to push events to.
        loop: Event loop that owns the state's queue.
    """

    def __init__(self, state: RunState, loop: asyncio.AbstractEventLoop) -> None:
        self._state = state
        self._loop = loop

    def _push(self, event: str, data: dict) -> None:
        self._loop.call_soon_threadsafe(self._state.queue.put_nowait, _sse_line(event, data))

    def on_experiment_start(self, kind: ExperimentKind, total_cells: int) -> None:
        self._state.cells_total = total_cells
        self._push("experiment_start", {"experiment": kind, "cells_total": total_cells})

    def on_cell_end(
        self, cell: dict[str, object], records: list[ExperimentRecord], done: int, total: int
    ) -> None:
        self._state.cells_done = done
        self._push(
            "cell_end",
            {
                "dataset": cell["dataset"],
                "rate": cell["rate"],
                "seed": cell["seed"],
                "records": len(records),
                "cells_done": done,
                "cells_total": total,
            },
        )
        logger.info("[%s] cell %d/%d finished", self._state.run_id, done, total)

    def on_experiment_end(self, report: ExperimentReport) -> None:
        self._push(
            "experiment_end",
            {"experiment": report.experiment, "records": len(report.records)},
        )


async def event_generator(state: RunState):
    """Yield SSE-formatted strings from a run's queue until done or error.

    Args:
        state: The RunState whose queue to consume.

    Yields:
        str: SSE-formatted event strings.
    """
    while True:
        msg: str = await state.queue.get()
        yield msg
        if msg.startswith("event: done") or msg.startswith("event: error"):
            break
