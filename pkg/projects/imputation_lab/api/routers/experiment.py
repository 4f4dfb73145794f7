"""Experiment API routes.

Exposes endpoints to list synthetic scenarios, start ranking or ordering
studies on them, stream SSE progress, and fetch aggregated results.
"""

import asyncio
import logging

from fastapi import APIRouter, HTTPException
from sse_starlette.sse import EventSourceResponse

from imputation_lab.api.schemas.experiment import (
    AggregateInfo,
    ExperimentRequest,
    ExperimentResultResponse,
    ExperimentRunResponse,
    ScenarioInfo,
)
from imputation_lab.api.streaming import (
    RunState,
    StreamingExperimentHooks,
    _sse_line,
    create_run,
    event_generator,
    get_run,
)
from imputation_lab.pipeline.experiments import run_ordering, run_ranking
from imputation_lab.pipeline.report import summary_lines
from imputation_lab.simulators.scenario_engine import SCENARIOS, list_scenarios
from imputation_lab.utils.config import ExperimentConfig, experiment_config_from_dict
from imputation_lab.utils.errors import ImputationLabError

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api/experiments", tags=["experiments"])

_background_runs: set[asyncio.Task] = set()


def cancel_background_runs() -> int:
    """Cancel every study task still running and return how many there were."""
    pending = [task for task in _background_runs if not task.done()]
    for task in pending:
        task.cancel()
    return len(pending)


def build_experiment_config(request: ExperimentRequest) -> ExperimentConfig:
    """Translate an API request into a single-dataset experiment config.

    Raises:
        ConfigError: If the resulting configuration is invalid.
    """
    forest = {"n_trees": request.n_trees}
    data: dict[str, object] = {
        "experiment": request.experiment,
        "datasets": [
            {
                "name": request.scenario_type,
                "synthetic": request.scenario_type,
                "synthetic_rows": request.rows,
                "target": SCENARIOS[request.scenario_type].target,
            }
        ],
        "seeds": request.seeds,
        "forest": forest,
        "missforest": {"forest": forest},
        "mice": {"forest": forest},
        "sfs": {"forest": forest},
    }
    if request.experiment == "ranking":
        if request.methods is not None:
            data["methods"] = request.methods
        if request.rates is not None:
            data["rates"] = request.rates
    else:
        ordering: dict[str, object] = {}
        if request.methods is not None:
            ordering["methods"] = request.methods
        if request.rates is not None:
            ordering["rates"] = request.rates
        data["ordering"] = ordering
    return experiment_config_from_dict(data)


async def _run_experiment(run_id: str, config: ExperimentConfig) -> None:
    """Execute a study in a worker thread and enqueue its final events.

    Args:
        run_id: The run identifier.
        config: Validated experiment configuration.
    """
    state = get_run(run_id)
    assert state is not None

    state.status = "running"
    hooks = StreamingExperimentHooks(state, asyncio.get_running_loop())
    run = run_ranking if state.experiment == "ranking" else run_ordering
    try:
        report = await asyncio.to_thread(run, config, ".", hooks, 1)
    except ImputationLabError as exc:
        state.status = "failed"
        state.error = str(exc)
        logger.warning("Experiment failed: run_id=%s: %s", run_id, exc)
        await state.queue.put(_sse_line("error", {"message": state.error}))
        return
    except Exception as exc:
        state.status = "failed"
        state.error = "internal error"
        logger.exception("Experiment crashed: run_id=%s", run_id)
        await state.queue.put(_sse_line("error", {"message": f"{type(exc).__name__}"}))
        return

    state.report = report
    state.status = "completed"
    await state.queue.put(_sse_line("report", {"summary": summary_lines(report)}))
    await state.queue.put(_sse_line("done", {"run_id": run_id}))
    logger.info("Experiment completed: run_id=%s", run_id)


def _result(state: RunState) -> ExperimentResultResponse:
    report = state.report
    return ExperimentResultResponse(
        run_id=state.run_id,
        status=state.status,
        experiment=state.experiment,
        scenario_type=state.scenario_type,
        cells_done=state.cells_done,
        cells_total=state.cells_total,
        aggregates=[
            AggregateInfo(
                dataset=a.dataset,
                rate=a.rate,
                method=a.method,
                arm=a.arm,
                metric=a.metric,
                mean=a.mean,
                sd=a.sd,
                n=a.n,
            )
            for a in (report.aggregates if report else [])
        ],
        summary=summary_lines(report) if report else [],
        error=state.error,
    )


@router.get("/scenarios", response_model=list[ScenarioInfo])
async def list_experiment_scenarios() -> list[ScenarioInfo]:
    """List the synthetic scenarios experiments can run on."""
    return [
        ScenarioInfo(
            scenario_type=s["name"],
            description=s["description"],
            default_rows=s["default_rows"],
            columns=s["columns"],
            target=s["target"],
        )
        for s in list_scenarios()
    ]


@router.post("", response_model=ExperimentRunResponse)
async def start_experiment_run(request: ExperimentRequest) -> ExperimentRunResponse:
    """Start a new study on a synthetic scenario.

    Args:
        request: Study kind, scenario and grid.

    Returns:
        ExperimentRunResponse: run_id and initial pending status.

    Raises:
        HTTPException: 422 if the request does not form a valid configuration.
    """
    try:
        config = build_experiment_config(request)
    except ImputationLabError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    state = create_run(request.experiment, request.scenario_type)
    task = asyncio.create_task(_run_experiment(state.run_id, config))
    _background_runs.add(task)
    task.add_done_callback(_background_runs.discard)
    return ExperimentRunResponse(run_id=state.run_id, status="pending")


@router.get("/{run_id}/stream")
async def stream_experiment(run_id: str) -> EventSourceResponse:
    """Stream SSE events for a run until done or error.

    Raises:
        HTTPException: 404 if the run does not exist.
    """
    state = get_run(run_id)
    if state is None:
        raise HTTPException(status_code=404, detail="Run not found")
    return EventSourceResponse(event_generator(state))


@router.get("/{run_id}", response_model=ExperimentResultResponse)
async def get_experiment_result(run_id: str) -> ExperimentResultResponse:
    """Fetch the current snapshot of a run.

    Raises:
        HTTPException: 404 if the run does not exist.
    """
    state = get_run(run_id)
    if state is None:
        raise HTTPException(status_code=404, detail="Run not found")
    return _result(state)
