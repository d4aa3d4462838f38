"""Verdict types shared by the classical, quantum, and GPT verifiers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from .knowledge import Event


class VerdictStatus(Enum):
    HOLDS = "holds"
    VACUOUS_EMPTY_COMMON_KNOWLEDGE = "vacuous_empty_common_knowledge"
    VACUOUS_NULL_COMMON_KNOWLEDGE = "vacuous_null_common_knowledge"
    VIOLATED = "violated"


@dataclass(frozen=True, eq=False)
class AgreementVerdict:
    """Outcome of an agreement check.

    ``posteriors`` holds the per-agent targets (reals, density operators, or
    GPT states, depending on the layer); ``pooled_posterior`` is the value
    conditioned on the common-knowledge event, or ``None`` when the verdict
    is vacuous. ``VIOLATED`` contradicts a theorem, so reaching it signals an
    implementation bug rather than a legal outcome.
    """

    status: VerdictStatus
    common_event: Event
    posteriors: tuple[Any, ...]
    pooled_posterior: Any

    @property
    def is_vacuous(self) -> bool:
        return self.status in (
            VerdictStatus.VACUOUS_EMPTY_COMMON_KNOWLEDGE,
            VerdictStatus.VACUOUS_NULL_COMMON_KNOWLEDGE,
        )

    @property
    def holds(self) -> bool:
        return self.status is VerdictStatus.HOLDS
