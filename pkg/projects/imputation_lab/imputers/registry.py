"""Single entry point that runs any imputation method by name."""

import logging
from dataclasses import asdict, dataclass, field, replace

from imputation_lab.imputers.knn import impute_knn
from imputation_lab.imputers.mice import run_mice
from imputation_lab.imputers.missforest import run_missforest
from imputation_lab.imputers.simple import (
    impute_interpolate,
    impute_locf,
    impute_mean,
    impute_median,
)
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.params import ImputationSettings, ImputerSpec
from imputation_lab.utils.seeding import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImputationOutcome:
    """A completed dataset plus what produced it.

    Attributes:
        dataset: Completed dataset.
        params: Every parameter the method ran with.
        details: Method diagnostics (sweep statistics, ridge fallbacks).
    """

    dataset: Dataset
    params: dict[str, object] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)


def impute(
    ds: Dataset,
    spec: ImputerSpec,
    settings: ImputationSettings | None = None,
    seed: int = 0,
) -> ImputationOutcome:
    """Run one imputation method.

    Randomized methods get a seed derived from the given seed and the method
    name. The binary target is never imputed and never used as a predictor.

    Args:
        ds: Dataset with missing feature cells.
        spec: Method (and interpolation order).
        settings: Parameters for the parameterized methods.
        seed: Base seed for randomized methods.

    Returns:
        ImputationOutcome: Completion, parameter echo and diagnostics.
    """
    settings = settings or ImputationSettings()
    method = spec.method
    params: dict[str, object] = {"method": method}
    details: dict[str, object] = {}

    if method == "mean":
        out = impute_mean(ds)
    elif method == "median":
        out = impute_median(ds)
    elif method == "locf":
        out = impute_locf(ds)
    elif method == "interpolate":
        params["interpolation_order"] = spec.interpolation_order
        out = impute_interpolate(ds, spec.interpolation_order)
    elif method == "knn":
        params.update(asdict(settings.knn))
        out = impute_knn(ds, settings.knn)
    elif method == "missforest":
        mf = replace(settings.missforest, seed=derive_seed(seed, "missforest"))
        params.update(asdict(mf))
        result = run_missforest(ds, mf)
        details = {
            "sweeps": result.sweeps,
            "returned_sweep": result.returned_sweep,
            "converged": result.converged,
            "sweep_statistics": [asdict(s) for s in result.statistics],
        }
        out = result.dataset
    else:
        mice = replace(settings.mice, seed=derive_seed(seed, "mice"))
        params.update(asdict(mice))
        result = run_mice(ds, mice)
        details = {"chains": len(result.chains), "ridge_fallbacks": result.ridge_fallbacks}
        out = result.dataset

    logger.debug("Imputed %s with %s (%d cells)", ds.name, method, ds.missing_count())
    return ImputationOutcome(out, params, details)
