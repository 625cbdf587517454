"""Stationary performance measures from a truncated solution."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .qbd import TruncatedStationarySolution

FIELDS = (
    "p_no_a", "p_no_b", "p_empty", "mean_q_a", "mean_q_b",
    "mean_q_paper", "mean_level_diff", "mean_q_total_abs",
)


@dataclass(frozen=True)
class PerformanceReport:
    """Queue-length measures.

    ``mean_q_paper`` is the composite ``E[Q1] P(Q1 > 0) + E[Q2] P(Q2 > 0)``
    reported in the reference tables; ``mean_q_total_abs`` is the ordinary
    ``E[|N|]`` and is provided only for comparison.
    """

    p_no_a: float
    p_no_b: float
    p_empty: float
    mean_q_a: float
    mean_q_b: float
    mean_q_paper: float
    mean_level_diff: float
    mean_q_total_abs: float
    k_star: int
    tail_mass: float
    truncation_error_bound: float

    def as_dict(self) -> dict:
        return asdict(self)

    def measures(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS}


def measures_from_levels(levels: np.ndarray, mass: np.ndarray) -> dict:
    """Seven measures from per-level probabilities (shared with the oracles)."""
    levels = np.asarray(levels)
    mass = np.clip(np.asarray(mass, dtype=float), 0.0, None)
    pos, neg = levels > 0, levels < 0
    p_no_a = float(mass[~pos].sum())
    p_no_b = float(mass[~neg].sum())
    mean_q_a = float((levels[pos] * mass[pos]).sum())
    mean_q_b = float((-levels[neg] * mass[neg]).sum())
    return {
        "p_no_a": p_no_a,
        "p_no_b": p_no_b,
        "p_empty": float(mass[levels == 0].sum()),
        "mean_q_a": mean_q_a,
        "mean_q_b": mean_q_b,
        "mean_q_paper": mean_q_a * (1.0 - p_no_a) + mean_q_b * (1.0 - p_no_b),
        "mean_level_diff": float((levels * mass).sum()),
        "mean_q_total_abs": mean_q_a + mean_q_b,
    }


def report(sol: TruncatedStationarySolution) -> PerformanceReport:
    values = measures_from_levels(sol.levels, sol.level_mass())
    return PerformanceReport(
        **values,
        k_star=sol.k_star,
        tail_mass=sol.tail_mass,
        truncation_error_bound=sol.tail_mass * (sol.k_star + 1),
    )
