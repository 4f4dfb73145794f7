"""Output guardrail for imputed datasets."""

import logging

import numpy as np

from imputation_lab.models.dataset import Dataset
from imputation_lab.models.guardrails import GuardrailResult

logger = logging.getLogger(__name__)


def validate_imputation_output(amputed: Dataset, imputed: Dataset) -> GuardrailResult:
    """Check that an imputer filled every hole and touched nothing else.

    Args:
        amputed: Dataset handed to the imputer.
        imputed: Dataset the imputer returned.

    Returns:
        GuardrailResult: Validation result with tripwire status.
    """
    if imputed.cells.shape != amputed.cells.shape or imputed.columns != amputed.columns:
        return GuardrailResult(
            output_info="Imputed dataset layout differs from its input.",
            tripwire_triggered=True,
        )

    holes = np.isnan(amputed.cells)
    features = np.zeros(amputed.col_count, dtype=bool)
    features[amputed.feature_indices] = True
    left = int(np.isnan(imputed.cells[:, features]).sum())
    if left:
        logger.warning("Output validation failed: %d cells still missing", left)
        return GuardrailResult(
            output_info=f"{left} feature cells are still missing after imputation.",
            tripwire_triggered=True,
        )

    kept = ~holes
    changed = int((imputed.cells[kept] != amputed.cells[kept]).sum())
    if changed:
        logger.warning("Output validation failed: %d observed cells changed", changed)
        return GuardrailResult(
            output_info=f"{changed} observed cells were modified by the imputer.",
            tripwire_triggered=True,
        )

    return GuardrailResult(
        output_info="Imputed dataset validated successfully.",
        tripwire_triggered=False,
    )
