"""Configuration loader for the imputation lab.

Environment settings come from variables (optionally a .env file); the
experiment itself is described by a TOML file validated with pydantic and
converted into the frozen parameter dataclasses the library consumes.
"""

import logging
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from imputation_lab.models.dataset import ColumnKind
from imputation_lab.models.experiment import ExperimentKind
from imputation_lab.models.params import (
    ALL_METHODS,
    ForestParams,
    ImputationMethod,
    ImputationSettings,
    InterpolationOrder,
    KnnDistance,
    KnnParams,
    KnnWeighting,
    MiceParams,
    MiceRegressor,
    MissForestParams,
    SfsParams,
)
from imputation_lab.utils.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_RATES: list[float] = [0.10, 0.15, 0.20, 0.25]
DEFAULT_ORDERING_RATES: list[float] = [0.15, 0.20]
DEFAULT_ORDERING_METHODS: list[ImputationMethod] = ["missforest", "mice"]


def load_config() -> dict[str, str | int | list[str] | None]:
    """Load environment configuration.

    Returns:
        dict[str, str | int | list[str] | None]: Configuration dictionary with keys:
            - config_path: Default experiment config file
            - data_dir: Base directory for relative dataset paths
            - workers: Parallel experiment cells
            - log_level: Logging level name
            - cors_origins: Browser origins allowed by the API
    """
    load_dotenv()
    workers = os.getenv("IMPUTATION_LAB_WORKERS", "1")
    origins = os.getenv(
        "IMPUTATION_LAB_CORS_ORIGINS", "http://localhost:5178,http://127.0.0.1:5178"
    )
    try:
        n_workers = int(workers)
    except ValueError as exc:
        raise ConfigError(
            f"IMPUTATION_LAB_WORKERS must be an integer, got {workers!r}"
        ) from exc
    return {
        "config_path": os.getenv("IMPUTATION_LAB_CONFIG"),
        "data_dir": os.getenv("IMPUTATION_LAB_DATA_DIR", "data"),
        "workers": n_workers,
        "log_level": os.getenv("IMPUTATION_LAB_LOG_LEVEL", "INFO"),
        "cors_origins": [o.strip() for o in origins.split(",") if o.strip()],
    }


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ForestSettings(_Section):
    n_trees: int = Field(100, ge=1)
    max_depth: int | None = Field(None, ge=0)
    min_leaf: int | None = Field(None, ge=1)
    mtry: int | None = Field(None, ge=1)
    bootstrap: bool = True
    n_jobs: int = Field(1, ge=1)

    def to_params(self, seed: int = 0) -> ForestParams:
        return ForestParams(seed=seed, **self.model_dump())


class InterpolateSettings(_Section):
    order: InterpolationOrder = "linear"


class KnnSettings(_Section):
    k: int = Field(5, ge=1)
    distance: KnnDistance = "euclidean"
    weighting: KnnWeighting = "uniform"


class MissForestSettings(_Section):
    max_iter: int = Field(10, ge=1)
    forest: ForestSettings = Field(default_factory=ForestSettings)


class MiceSettings(_Section):
    n_chains: int = Field(5, ge=1)
    iterations: int = Field(10, ge=1)
    regressor: MiceRegressor = "linear"
    pmm_donors: int = Field(5, ge=0)
    forest: ForestSettings = Field(default_factory=ForestSettings)


class SfsSettings(_Section):
    folds: int = Field(5, ge=2)
    max_features: int | None = Field(None, ge=1)
    forest: ForestSettings = Field(default_factory=ForestSettings)


class OrderingSettings(_Section):
    methods: list[ImputationMethod] = Field(
        default_factory=lambda: list(DEFAULT_ORDERING_METHODS)
    )
    rates: list[float] = Field(default_factory=lambda: list(DEFAULT_ORDERING_RATES))

    @field_validator("rates")
    @classmethod
    def _rates_open_unit(cls, rates: list[float]) -> list[float]:
        return _check_rates(rates)


def _check_rates(rates: list[float]) -> list[float]:
    if not rates:
        raise ValueError("at least one rate is required")
    for rate in rates:
        if not 0.0 < rate < 1.0:
            raise ValueError(f"rates must lie in (0, 1), got {rate}")
    return rates


class DatasetRecipe(_Section):
    """Where a dataset comes from and how it is prepared.

    Exactly one of path and synthetic is set.
    """

    name: str
    path: str | None = None
    synthetic: Literal["breast_cancer_like", "diabetes_like", "heart_like"] | None = None
    synthetic_rows: int | None = Field(None, ge=10)
    synthetic_seed: int = 0
    target: str
    positive: str | None = None
    kinds: dict[str, ColumnKind] = Field(default_factory=dict)
    drop_columns: list[str] = Field(default_factory=list)
    missing_markers: list[str] = Field(default_factory=lambda: ["", "NA", "?"])
    oversample_to: int | None = Field(None, ge=1)
    drop_incomplete_rows: bool = True

    @model_validator(mode="after")
    def _one_source(self) -> "DatasetRecipe":
        if (self.path is None) == (self.synthetic is None):
            raise ValueError(
                f"dataset {self.name!r} needs exactly one of 'path' or 'synthetic'"
            )
        return self


class ExperimentConfig(_Section):
    """Validated experiment configuration."""

    experiment: ExperimentKind = "ranking"
    datasets: list[DatasetRecipe] = Field(default_factory=list)
    rates: list[float] = Field(default_factory=lambda: list(DEFAULT_RATES))
    methods: list[ImputationMethod] = Field(default_factory=lambda: list(ALL_METHODS))
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    test_fraction: float = Field(0.2, gt=0.0, lt=1.0)
    workers: int = Field(1, ge=1)
    interpolate: InterpolateSettings = Field(default_factory=InterpolateSettings)
    knn: KnnSettings = Field(default_factory=KnnSettings)
    forest: ForestSettings = Field(default_factory=ForestSettings)
    missforest: MissForestSettings = Field(default_factory=MissForestSettings)
    mice: MiceSettings = Field(default_factory=MiceSettings)
    sfs: SfsSettings = Field(default_factory=SfsSettings)
    ordering: OrderingSettings = Field(default_factory=OrderingSettings)

    @field_validator("rates")
    @classmethod
    def _rates_open_unit(cls, rates: list[float]) -> list[float]:
        return _check_rates(rates)

    @field_validator("seeds")
    @classmethod
    def _seeds_present(cls, seeds: list[int]) -> list[int]:
        if not seeds:
            raise ValueError("at least one seed is required")
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        return seeds

    @field_validator("methods")
    @classmethod
    def _methods_present(cls, methods: list[ImputationMethod]) -> list[ImputationMethod]:
        if not methods:
            raise ValueError("at least one method is required")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must be distinct")
        return methods

    @model_validator(mode="after")
    def _unique_dataset_names(self) -> "ExperimentConfig":
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ValueError("dataset names must be distinct")
        return self

    def imputation_settings(self) -> ImputationSettings:
        """Imputer parameters with placeholder seeds (set per cell)."""
        return ImputationSettings(
            interpolation_order=self.interpolate.order,
            knn=KnnParams(**self.knn.model_dump()),
            missforest=MissForestParams(
                max_iter=self.missforest.max_iter,
                forest=self.missforest.forest.to_params(),
            ),
            mice=MiceParams(
                n_chains=self.mice.n_chains,
                iterations=self.mice.iterations,
                regressor=self.mice.regressor,
                pmm_donors=self.mice.pmm_donors,
                forest=self.mice.forest.to_params(),
            ),
        )

    def sfs_params(self) -> SfsParams:
        return SfsParams(
            folds=self.sfs.folds,
            max_features=self.sfs.max_features,
            forest=self.sfs.forest.to_params(),
        )

    def classifier_params(self) -> ForestParams:
        return self.forest.to_params()


def experiment_config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping into an ExperimentConfig.

    Raises:
        ConfigError: If validation fails.
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid experiment configuration:\n{exc}") from exc


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment TOML file.

    Args:
        path: TOML file path.

    Returns:
        ExperimentConfig: The validated configuration.

    Raises:
        ConfigError: If the file is missing, is not valid TOML, or fails validation.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
    config = experiment_config_from_dict(data)
    logger.info(
        "Loaded config %s: experiment=%s, datasets=%d, rates=%s, methods=%d, seeds=%d",
        path,
        config.experiment,
        len(config.datasets),
        config.rates,
        len(config.methods),
        len(config.seeds),
    )
    return config
