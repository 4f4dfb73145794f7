"""Result model shared by the data guardrails."""

from dataclasses import dataclass


@dataclass(frozen=True)
class GuardrailResult:
    """Outcome of a guardrail check.

    Attributes:
        output_info: Human-readable explanation.
        tripwire_triggered: True when the check failed.
    """

    output_info: str
    tripwire_triggered: bool
