"""Data models for feature selection results and experiment reports.

Records are the raw per-cell measurements; aggregates, orderings and
ratings are derived from them and can always be recomputed.
"""

from dataclasses import dataclass, field
from typing import Literal

from imputation_lab.models.scores import ClassificationScores, ErrorScores

ExperimentKind = Literal["ranking", "ordering"]

# Arms of the ordering study
Arm = Literal["impute_then_select", "select_then_impute"]

ARMS: tuple[Arm, ...] = ("impute_then_select", "select_then_impute")


@dataclass(frozen=True)
class SfsStep:
    """One accepted step of forward selection.

    Attributes:
        column: Column added at this step.
        score: Cross-validated accuracy of the selected set after adding it.
    """

    column: str
    score: float


@dataclass(frozen=True)
class SfsResult:
    """Outcome of sequential forward selection.

    Attributes:
        selected: Selected column names in the order they were added.
        trajectory: Accepted steps, one per selected column.
        criterion: Score used to compare candidate sets.
        complete_case: Whether candidates were scored on complete-case rows.
    """

    selected: list[str]
    trajectory: list[SfsStep]
    criterion: str = "accuracy"
    complete_case: bool = False


@dataclass(frozen=True)
class ExperimentRecord:
    """Measurements for one (dataset, rate, method, seed[, arm]) cell.

    Attributes:
        experiment: Which study produced the record.
        dataset: Dataset name.
        rate: Missingness rate.
        method: Imputation method.
        seed: Experiment seed.
        arm: Ordering-study arm, None for ranking records.
        error: Imputation error on the scaled data (ranking).
        classification: Held-out classification scores (ordering).
        column_errors: Per-column error in raw units (ranking).
        selected_features: Columns chosen by forward selection (ordering).
        params: Echo of every parameter the method ran with.
        details: Method diagnostics (sweep statistics, ridge fallbacks).
        wall_time_s: Elapsed seconds for the method.
        version: Library version that produced the record.
    """

    experiment: ExperimentKind
    dataset: str
    rate: float
    method: str
    seed: int
    arm: Arm | None = None
    error: ErrorScores | None = None
    classification: ClassificationScores | None = None
    column_errors: dict[str, ErrorScores] = field(default_factory=dict)
    selected_features: list[str] = field(default_factory=list)
    params: dict[str, object] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)
    wall_time_s: float = 0.0
    version: str = ""


@dataclass(frozen=True)
class AggregateRow:
    """Mean and standard deviation of one metric over seeds."""

    dataset: str
    rate: float
    method: str
    arm: Arm | None
    metric: str
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class Ordering:
    """Methods sorted from lowest to highest mean error."""

    dataset: str
    rate: float
    metric: str
    methods: list[str]


@dataclass(frozen=True)
class ArmRating:
    """How many classification metrics each ordering-study arm wins.

    Attributes:
        impute_first_wins: Metrics where impute-then-select has the higher mean.
        select_first_wins: Metrics where select-then-impute has the higher mean.
        compared: Number of metrics compared.
    """

    dataset: str
    rate: float
    method: str
    impute_first_wins: int
    select_first_wins: int
    compared: int = 4

    @property
    def rating(self) -> str:
        return f"{self.impute_first_wins}/{self.compared}"


@dataclass(frozen=True)
class ExperimentReport:
    """Records plus everything derived from them.

    Attributes:
        experiment: Study kind.
        records: Raw records in deterministic order.
        aggregates: Mean/sd over seeds per (dataset, rate, method, arm, metric).
        orderings: Method orderings per (dataset, rate, metric), ranking only.
        ratings: Arm ratings per (dataset, rate, method), ordering only.
        config: Echo of the configuration the study ran with.
        conventions: Declared interpretation choices (zero-denominator rule, split, ...).
        version: Library version.
    """

    experiment: ExperimentKind
    records: list[ExperimentRecord]
    aggregates: list[AggregateRow] = field(default_factory=list)
    orderings: list[Ordering] = field(default_factory=list)
    ratings: list[ArmRating] = field(default_factory=list)
    config: dict[str, object] = field(default_factory=dict)
    conventions: dict[str, str] = field(default_factory=dict)
    version: str = ""
