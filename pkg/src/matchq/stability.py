"""Recurrence classification of the bilateral level process."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

RATE_RTOL = 1e-9


class Recurrence(enum.Enum):
    POSITIVE = "PositiveRecurrent"
    NULL = "NullRecurrent"
    TRANSIENT = "Transient"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RecurrenceClass:
    tag: Recurrence
    rationale: str

    @property
    def positive(self) -> bool:
        return self.tag is Recurrence.POSITIVE

    def __str__(self):
        return f"{self.tag.value} ({self.rationale})"


def _compare(a: float, b: float) -> int:
    if math.isclose(a, b, rel_tol=RATE_RTOL, abs_tol=0.0):
        return 0
    return 1 if a > b else -1


def classify(lambda1: float, lambda2: float, theta1: float, theta2: float) -> RecurrenceClass:
    """Classify from the arrival rates and impatience rates alone.

    Both impatience rates positive always gives positive recurrence. With
    one side patient, that side's queue is stable only if the impatient
    side arrives faster; with both patient the process is never positive
    recurrent. Rate equality uses a relative tolerance of 1e-9.
    """
    for name, value in (("lambda1", lambda1), ("lambda2", lambda2),
                        ("theta1", theta1), ("theta2", theta2)):
        if not (value >= 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be finite and nonnegative, got {value}")
    if not (lambda1 > 0 and lambda2 > 0):
        raise ValueError("arrival rates must be positive")

    if theta1 > 0 and theta2 > 0:
        return RecurrenceClass(Recurrence.POSITIVE, "Theorem 1")
    cmp = _compare(lambda1, lambda2)
    if theta1 == 0 and theta2 == 0:
        tag = Recurrence.NULL if cmp == 0 else Recurrence.TRANSIENT
        return RecurrenceClass(tag, "Corollary 1")
    if theta1 > 0:
        # B-queue is patient: it drains only if A-customers outpace B-customers
        tag = {0: Recurrence.NULL, 1: Recurrence.POSITIVE, -1: Recurrence.TRANSIENT}[cmp]
        return RecurrenceClass(tag, "Corollary 2")
    tag = {0: Recurrence.NULL, -1: Recurrence.POSITIVE, 1: Recurrence.TRANSIENT}[cmp]
    return RecurrenceClass(tag, "Corollary 2, mirrored")


def classify_model(model) -> RecurrenceClass:
    return classify(model.lambda1, model.lambda2, model.theta1, model.theta2)
