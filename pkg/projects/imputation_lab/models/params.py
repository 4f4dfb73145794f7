"""Parameter models for imputers and learners.

All parameter objects are frozen and validate on construction; invalid
values raise ConfigError.
"""

import math
from dataclasses import dataclass, field
from typing import Literal

from imputation_lab.utils.errors import ConfigError

# The seven benchmarked imputation techniques, in report order
ImputationMethod = Literal[
    "mean",
    "median",
    "locf",
    "interpolate",
    "knn",
    "missforest",
    "mice",
]

ALL_METHODS: tuple[ImputationMethod, ...] = (
    "mean",
    "median",
    "locf",
    "interpolate",
    "knn",
    "missforest",
    "mice",
)

InterpolationOrder = Literal["linear", "quadratic", "cubic"]

# Polynomial degree for each interpolation order
INTERPOLATION_DEGREE: dict[InterpolationOrder, int] = {
    "linear": 1,
    "quadratic": 2,
    "cubic": 3,
}

KnnDistance = Literal["euclidean", "manhattan"]
KnnWeighting = Literal["uniform", "inverse_distance"]
ForestTask = Literal["regression", "classification"]
MiceRegressor = Literal["linear", "forest"]


@dataclass(frozen=True)
class ImputerSpec:
    """Which imputer to run.

    Attributes:
        method: Imputation technique.
        interpolation_order: Order for the interpolate method, None otherwise.
    """

    method: ImputationMethod
    interpolation_order: InterpolationOrder | None = None

    def __post_init__(self) -> None:
        if self.method not in ALL_METHODS:
            raise ConfigError(f"unknown imputation method {self.method!r}")
        if (self.method == "interpolate") != (self.interpolation_order is not None):
            raise ConfigError(
                "interpolation_order must be set exactly when method is 'interpolate'"
            )
        if (
            self.interpolation_order is not None
            and self.interpolation_order not in INTERPOLATION_DEGREE
        ):
            raise ConfigError(
                f"unknown interpolation order {self.interpolation_order!r}"
            )

    @classmethod
    def of(
        cls, method: ImputationMethod, order: InterpolationOrder = "linear"
    ) -> "ImputerSpec":
        """Spec for a method, attaching the order only for interpolation."""
        return cls(method, order if method == "interpolate" else None)


@dataclass(frozen=True)
class KnnParams:
    """Nearest-neighbour imputation settings.

    Attributes:
        k: Number of neighbours.
        distance: Distance over commonly observed coordinates.
        weighting: Neighbour vote weighting.
    """

    k: int = 5
    distance: KnnDistance = "euclidean"
    weighting: KnnWeighting = "uniform"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"knn.k must be >= 1, got {self.k}")
        if self.distance not in ("euclidean", "manhattan"):
            raise ConfigError(f"unknown knn distance {self.distance!r}")
        if self.weighting not in ("uniform", "inverse_distance"):
            raise ConfigError(f"unknown knn weighting {self.weighting!r}")


@dataclass(frozen=True)
class ForestParams:
    """Random forest hyperparameters.

    None for min_leaf or mtry means the task default: min_leaf 1 for
    classification and 5 for regression; mtry ceil(sqrt(p)) for
    classification and ceil(p/3) for regression.

    Attributes:
        n_trees: Number of trees.
        max_depth: Depth cap, None for unlimited.
        min_leaf: Minimum training rows per leaf.
        mtry: Columns tried per split.
        bootstrap: Whether each tree sees a bootstrap resample.
        seed: Root seed for per-tree random streams.
        n_jobs: Threads used to train trees (results do not depend on it).
    """

    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int | None = None
    mtry: int | None = None
    bootstrap: bool = True
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ConfigError(f"forest.n_trees must be >= 1, got {self.n_trees}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError(f"forest.max_depth must be >= 0, got {self.max_depth}")
        if self.min_leaf is not None and self.min_leaf < 1:
            raise ConfigError(f"forest.min_leaf must be >= 1, got {self.min_leaf}")
        if self.mtry is not None and self.mtry < 1:
            raise ConfigError(f"forest.mtry must be >= 1, got {self.mtry}")
        if self.n_jobs < 1:
            raise ConfigError(f"forest.n_jobs must be >= 1, got {self.n_jobs}")

    def resolved_min_leaf(self, task: ForestTask) -> int:
        if self.min_leaf is not None:
            return self.min_leaf
        return 1 if task == "classification" else 5

    def resolved_mtry(self, task: ForestTask, n_features: int) -> int:
        if self.mtry is not None:
            if self.mtry > n_features:
                raise ConfigError(
                    f"forest.mtry={self.mtry} exceeds the {n_features} available columns"
                )
            return self.mtry
        if task == "classification":
            return max(1, math.ceil(math.sqrt(n_features)))
        return max(1, math.ceil(n_features / 3))


@dataclass(frozen=True)
class MissForestParams:
    """Iterative random-forest imputation settings.

    Attributes:
        max_iter: Maximum number of sweeps.
        forest: Forest hyperparameters used for every column model.
        seed: Root seed.
    """

    max_iter: int = 10
    forest: ForestParams = field(default_factory=ForestParams)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ConfigError(f"missforest.max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class MiceParams:
    """Chained-equation imputation settings.

    Attributes:
        n_chains: Number of independent chains (m).
        iterations: Sweeps per chain.
        regressor: Conditional model for each column.
        pmm_donors: Donor pool size for predictive mean matching, 0 disables it.
        forest: Forest hyperparameters for the forest regressor.
        seed: Root seed.
    """

    n_chains: int = 5
    iterations: int = 10
    regressor: MiceRegressor = "linear"
    pmm_donors: int = 5
    forest: ForestParams = field(default_factory=ForestParams)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_chains < 1:
            raise ConfigError(f"mice.n_chains must be >= 1, got {self.n_chains}")
        if self.iterations < 1:
            raise ConfigError(f"mice.iterations must be >= 1, got {self.iterations}")
        if self.regressor not in ("linear", "forest"):
            raise ConfigError(f"unknown mice regressor {self.regressor!r}")
        if self.pmm_donors < 0:
            raise ConfigError(f"mice.pmm_donors must be >= 0, got {self.pmm_donors}")


@dataclass(frozen=True)
class ImputationSettings:
    """Parameters for every imputation method, bundled for one run.

    Seeds inside the nested params are overridden per experiment cell.

    Attributes:
        interpolation_order: Order used by the interpolate method.
        knn: Nearest-neighbour settings.
        missforest: MissForest settings.
        mice: MICE settings.
    """

    interpolation_order: InterpolationOrder = "linear"
    knn: KnnParams = field(default_factory=KnnParams)
    missforest: MissForestParams = field(default_factory=MissForestParams)
    mice: MiceParams = field(default_factory=MiceParams)

    def spec_for(self, method: ImputationMethod) -> ImputerSpec:
        return ImputerSpec.of(method, self.interpolation_order)


@dataclass(frozen=True)
class SfsParams:
    """Sequential forward selection settings.

    Attributes:
        folds: Cross-validation folds.
        max_features: Cap on selected columns, None for no cap.
        forest: Classifier hyperparameters used to score candidate sets.
    """

    folds: int = 5
    max_features: int | None = None
    forest: ForestParams = field(default_factory=ForestParams)

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ConfigError(f"sfs.folds must be >= 2, got {self.folds}")
        if self.max_features is not None and self.max_features < 1:
            raise ConfigError(
                f"sfs.max_features must be >= 1, got {self.max_features}"
            )
