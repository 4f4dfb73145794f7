"""Scenario engine that generates synthetic benchmark datasets.

Each scenario mimics the shape of one public clinical dataset: the same
column names and kinds, plausible value ranges, correlated features driven
by a few latent factors, and a binary outcome that depends on them. The
output is a raw (unencoded, unscaled) Dataset, so it flows through exactly
the same preparation steps as a file loaded from disk.
"""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from imputation_lab.models.dataset import Column, ColumnKind, Dataset
from imputation_lab.utils.errors import ConfigError
from imputation_lab.utils.seeding import make_rng

logger = logging.getLogger(__name__)

# Supported scenario types
ScenarioType = Literal["breast_cancer_like", "diabetes_like", "heart_like"]

_N_FACTORS = 3


@dataclass(frozen=True)
class FeatureSpec:
    """How one synthetic column is derived from the latent factors.

    Attributes:
        name: Column name.
        kind: Column kind of the generated column.
        loadings: Weight of each latent factor.
        noise: Standard deviation of the column's own noise.
        center: Location in raw units.
        spread: Scale in raw units.
        low: Lower clip in raw units.
        high: Upper clip in raw units.
        levels: Level texts for categorical columns (sorted).
    """

    name: str
    kind: ColumnKind
    loadings: tuple[float, float, float]
    noise: float
    center: float
    spread: float
    low: float
    high: float
    levels: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    """A synthetic dataset recipe.

    Attributes:
        name: Scenario name.
        description: One-line description.
        default_rows: Row count of the public dataset it mimics.
        features: Feature column specs.
        target: Name of the outcome column.
        target_levels: Outcome level texts (negative, positive).
        target_loadings: Logit weight of each latent factor.
        prevalence: Share of rows in the positive class.
    """

    name: ScenarioType
    description: str
    default_rows: int
    features: tuple[FeatureSpec, ...]
    target: str
    target_levels: tuple[str, str]
    target_loadings: tuple[float, float, float]
    prevalence: float


def _cont(name, loadings, noise, center, spread, low, high) -> FeatureSpec:
    return FeatureSpec(name, "continuous", loadings, noise, center, spread, low, high)


def _disc(name, loadings, noise, center, spread, low, high) -> FeatureSpec:
    return FeatureSpec(name, "discrete", loadings, noise, center, spread, low, high)


def _cat(name, loadings, noise, levels) -> FeatureSpec:
    return FeatureSpec(name, "categorical", loadings, noise, 0.0, 1.0, 0.0, 0.0, levels)


def _breast_cancer_features() -> tuple[FeatureSpec, ...]:
    # (name, center, spread, low, high, loadings on size / texture / shape)
    base = [
        ("radius", 14.1, 3.5, 6.9, 28.1, (0.95, 0.1, 0.2)),
        ("texture", 19.3, 4.3, 9.7, 39.3, (0.3, 0.9, 0.1)),
        ("perimeter", 92.0, 24.3, 43.7, 188.5, (0.95, 0.1, 0.3)),
        ("area", 655.0, 352.0, 143.5, 2501.0, (0.9, 0.05, 0.2)),
        ("smoothness", 0.096, 0.014, 0.053, 0.163, (0.1, 0.1, 0.8)),
        ("compactness", 0.104, 0.053, 0.019, 0.345, (0.4, 0.1, 0.85)),
        ("concavity", 0.089, 0.080, 0.0, 0.427, (0.6, 0.1, 0.75)),
        ("concave_points", 0.049, 0.039, 0.0, 0.201, (0.75, 0.1, 0.6)),
        ("symmetry", 0.181, 0.027, 0.106, 0.304, (0.1, 0.05, 0.6)),
        ("fractal_dimension", 0.063, 0.007, 0.05, 0.097, (-0.3, 0.05, 0.7)),
    ]
    groups = (("mean", 1.0, 0.25), ("se", 0.12, 0.6), ("worst", 1.25, 0.3))
    features = []
    for suffix, scale, noise in groups:
        for name, center, spread, low, high, loadings in base:
            features.append(
                _cont(
                    f"{name}_{suffix}",
                    loadings,
                    noise,
                    center * scale,
                    spread * scale,
                    low * scale,
                    high * scale * 1.2,
                )
            )
    return tuple(features)


SCENARIOS: dict[ScenarioType, Scenario] = {
    "breast_cancer_like": Scenario(
        name="breast_cancer_like",
        description="Tumour cell-nucleus measurements with a benign/malignant diagnosis.",
        default_rows=569,
        features=_breast_cancer_features(),
        target="diagnosis",
        target_levels=("B", "M"),
        target_loadings=(2.5, 0.8, 1.5),
        prevalence=212 / 569,
    ),
    "diabetes_like": Scenario(
        name="diabetes_like",
        description="Diagnostic measurements with a diabetes onset outcome.",
        default_rows=768,
        features=(
            _disc("Pregnancies", (0.1, 0.0, 0.8), 0.6, 3.8, 3.4, 0, 17),
            _disc("Glucose", (0.9, 0.1, 0.1), 0.45, 121.0, 30.0, 44, 199),
            _disc("BloodPressure", (0.2, 0.6, 0.3), 0.7, 72.0, 12.0, 24, 122),
            _disc("SkinThickness", (0.2, 0.8, 0.0), 0.5, 29.0, 9.5, 7, 99),
            _disc("Insulin", (0.7, 0.3, 0.0), 0.6, 155.0, 85.0, 14, 846),
            _cont("BMI", (0.25, 0.85, 0.0), 0.4, 32.4, 6.9, 18.2, 67.1),
            _cont("DiabetesPedigreeFunction", (0.3, 0.0, 0.0), 0.95, 0.47, 0.33, 0.078, 2.42),
            _disc("Age", (0.2, 0.0, 0.9), 0.4, 33.2, 11.8, 21, 81),
        ),
        target="Outcome",
        target_levels=("0", "1"),
        target_loadings=(2.2, 1.0, 0.6),
        prevalence=268 / 768,
    ),
    "heart_like": Scenario(
        name="heart_like",
        description="Cardiology patient records with a heart-disease outcome.",
        default_rows=303,
        features=(
            _disc("age", (0.1, 0.0, 0.9), 0.4, 54.4, 9.1, 29, 77),
            _disc("sex", (0.2, 0.0, 0.0), 1.0, 0.68, 0.47, 0, 1),
            _cat(
                "cp",
                (-0.7, 0.2, 0.0),
                0.7,
                ("asymptomatic", "atypical", "nonanginal", "typical"),
            ),
            _disc("trestbps", (0.1, 0.1, 0.5), 0.8, 131.6, 17.5, 94, 200),
            _disc("chol", (0.1, 0.2, 0.4), 0.8, 246.0, 51.8, 126, 564),
            _disc("fbs", (0.0, 0.2, 0.3), 0.9, 0.15, 0.36, 0, 1),
            _cat("restecg", (0.2, 0.0, 0.2), 0.9, ("hypertrophy", "normal", "st_abnormal")),
            _disc("thalach", (-0.6, 0.0, -0.6), 0.5, 149.6, 22.9, 71, 202),
            _disc("exang", (0.7, 0.0, 0.0), 0.7, 0.33, 0.47, 0, 1),
            _cont("oldpeak", (0.7, 0.0, 0.2), 0.6, 1.04, 1.16, 0.0, 6.2),
            _cat("slope", (0.5, 0.1, 0.0), 0.8, ("down", "flat", "up")),
            _disc("ca", (0.5, 0.0, 0.4), 0.7, 0.73, 1.0, 0, 4),
            _cat("thal", (0.6, 0.3, 0.0), 0.7, ("fixed", "normal", "reversible")),
        ),
        target="target",
        target_levels=("0", "1"),
        target_loadings=(2.4, 0.3, 0.8),
        prevalence=165 / 303,
    ),
}


def list_scenarios() -> list[dict[str, object]]:
    """Describe the available scenarios.

    Returns:
        list[dict[str, object]]: One entry per scenario with name, description,
            default row count and column count.
    """
    return [
        {
            "name": s.name,
            "description": s.description,
            "default_rows": s.default_rows,
            "columns": len(s.features) + 1,
            "target": s.target,
        }
        for s in SCENARIOS.values()
    ]


def _feature_values(spec: FeatureSpec, signal: np.ndarray) -> np.ndarray:
    if spec.kind == "categorical":
        cuts = np.quantile(signal, np.linspace(0, 1, len(spec.levels) + 1)[1:-1])
        return np.searchsorted(cuts, signal, side="right").astype(float)
    values = spec.center + spec.spread * signal
    values = np.clip(values, spec.low, spec.high)
    if spec.kind == "discrete":
        return np.floor(values + 0.5)
    return np.round(values, 4)


def generate_scenario(
    scenario: ScenarioType, n_rows: int | None = None, seed: int = 0
) -> Dataset:
    """Generate a synthetic dataset for a scenario.

    The positive class holds exactly round(prevalence * n_rows) rows: the
    rows with the highest noisy outcome logits.

    Args:
        scenario: Scenario name.
        n_rows: Row count, defaults to the mimicked dataset's size.
        seed: Generation seed.

    Returns:
        Dataset: Raw dataset with feature columns and a two-level outcome column.

    Raises:
        ConfigError: If the scenario is unknown or n_rows is below 10.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {scenario!r}, expected one of {sorted(SCENARIOS)}"
        )
    spec = SCENARIOS[scenario]
    n_rows = spec.default_rows if n_rows is None else n_rows
    if n_rows < 10:
        raise ConfigError(f"synthetic datasets need at least 10 rows, got {n_rows}")

    rng = make_rng(seed, "scenario", scenario)
    factors = rng.standard_normal((n_rows, _N_FACTORS))

    columns: list[Column] = []
    grid = np.empty((n_rows, len(spec.features) + 1), dtype=float)
    for j, feature in enumerate(spec.features):
        weights = np.asarray(feature.loadings)
        signal = factors @ weights + feature.noise * rng.standard_normal(n_rows)
        signal = signal / np.sqrt(weights @ weights + feature.noise**2)
        grid[:, j] = _feature_values(feature, signal)
        columns.append(Column(feature.name, feature.kind, feature.levels))

    logits = factors @ np.asarray(spec.target_loadings) + rng.logistic(size=n_rows)
    n_positive = int(np.floor(spec.prevalence * n_rows + 0.5))
    positive_rows = np.argsort(-logits, kind="stable")[:n_positive]
    outcome = np.zeros(n_rows)
    outcome[positive_rows] = 1.0
    grid[:, -1] = outcome
    columns.append(Column(spec.target, "categorical", spec.target_levels))

    logger.info(
        "Generated scenario %s: rows=%d, cols=%d, positives=%d, seed=%d",
        scenario,
        n_rows,
        len(columns),
        n_positive,
        seed,
    )
    return Dataset(scenario, tuple(columns), grid)
