"""Pydantic schemas for the experiment API.

Request/response models for starting studies on synthetic scenarios and
reading back their aggregated results.
"""

from typing import Literal

from pydantic import BaseModel, Field

from imputation_lab.models.experiment import ExperimentKind
from imputation_lab.models.params import ImputationMethod
from imputation_lab.simulators.scenario_engine import ScenarioType

RunStatus = Literal["pending", "running", "completed", "failed"]


class ExperimentRequest(BaseModel):
    """Request body to start a study on one synthetic scenario.

    Attributes:
        experiment: Which study to run.
        scenario_type: Synthetic scenario used as the dataset.
        rows: Rows to generate, the scenario default when omitted.
        methods: Methods to compare, the study default when omitted.
        rates: Missingness rates, the study default when omitted.
        seeds: Experiment seeds.
        n_trees: Trees per forest for every forest in the study.
    """

    experiment: ExperimentKind = "ranking"
    scenario_type: ScenarioType
    rows: int | None = Field(None, ge=10, le=5000)
    methods: list[ImputationMethod] | None = None
    rates: list[float] | None = None
    seeds: list[int] = Field(default_factory=lambda: [0, 1, 2])
    n_trees: int = Field(20, ge=1, le=500)


class ExperimentRunResponse(BaseModel):
    """Response after starting a run."""

    run_id: str
    status: RunStatus


class ScenarioInfo(BaseModel):
    """Metadata for one synthetic scenario."""

    scenario_type: ScenarioType
    description: str
    default_rows: int
    columns: int
    target: str


class AggregateInfo(BaseModel):
    """One aggregated metric of a finished run."""

    dataset: str
    rate: float
    method: str
    arm: str | None
    metric: str
    mean: float
    sd: float
    n: int


class ExperimentResultResponse(BaseModel):
    """Snapshot of a run.

    Attributes:
        run_id: Run identifier.
        status: Current run status.
        experiment: Study kind.
        scenario_type: Scenario the study ran on.
        cells_done: Finished cells so far.
        cells_total: Total cells, 0 until the run starts.
        aggregates: Aggregated metrics once completed.
        summary: Orderings (ranking) or arm ratings (ordering), one line each.
        error: Failure message when status is "failed".
    """

    run_id: str
    status: RunStatus
    experiment: ExperimentKind
    scenario_type: ScenarioType
    cells_done: int = 0
    cells_total: int = 0
    aggregates: list[AggregateInfo] = Field(default_factory=list)
    summary: list[str] = Field(default_factory=list)
    error: str = Field(default="")
