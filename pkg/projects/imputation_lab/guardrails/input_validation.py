"""Input guardrail for datasets entering an experiment.

Ensures a prepared dataset can be amputed and scored before any cell of
the experiment grid is scheduled.
"""

import logging

import numpy as np

from imputation_lab.models.dataset import Dataset
from imputation_lab.models.guardrails import GuardrailResult

logger = logging.getLogger(__name__)


def validate_experiment_input(ds: Dataset, min_class_rows: int = 2) -> GuardrailResult:
    """Validate that a dataset is ready for amputation.

    Checks that a binary target exists, that there is at least one feature
    column, that no feature cell is missing, and that both classes have
    enough rows to stratify.

    Args:
        ds: Prepared dataset.
        min_class_rows: Rows each class needs.

    Returns:
        GuardrailResult: Validation result with tripwire status.
    """
    if ds.target_index is None:
        logger.warning("Input validation failed: %s has no binary target", ds.name)
        return GuardrailResult(
            output_info=f"Dataset {ds.name!r} has no binary target column.",
            tripwire_triggered=True,
        )

    features = ds.feature_indices
    if not features:
        logger.warning("Input validation failed: %s has no feature columns", ds.name)
        return GuardrailResult(
            output_info=f"Dataset {ds.name!r} has no feature columns.",
            tripwire_triggered=True,
        )

    missing = int(np.isnan(ds.cells[:, features]).sum())
    if missing:
        logger.warning("Input validation failed: %s has %d missing cells", ds.name, missing)
        return GuardrailResult(
            output_info=(
                f"Dataset {ds.name!r} has {missing} missing feature cells; "
                "experiments need complete data before amputation."
            ),
            tripwire_triggered=True,
        )

    counts = np.bincount(ds.target, minlength=2)
    if counts.min() < min_class_rows:
        logger.warning("Input validation failed: %s class counts %s", ds.name, counts.tolist())
        return GuardrailResult(
            output_info=(
                f"Dataset {ds.name!r} has class counts {counts.tolist()}; "
                f"each class needs at least {min_class_rows} rows."
            ),
            tripwire_triggered=True,
        )

    logger.info(
        "Input validation passed: dataset=%s, rows=%d, features=%d, classes=%s",
        ds.name,
        ds.row_count,
        len(features),
        counts.tolist(),
    )
    return GuardrailResult(
        output_info="Dataset validated successfully.",
        tripwire_triggered=False,
    )
