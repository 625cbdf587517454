"""Markovian arrival processes (MAPs).

A MAP of order m is a pair ``(C, D)``: ``D`` holds phase transitions that
produce an arrival, ``C`` the silent ones. ``C + D`` is the generator of
the background phase process.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionError,
    InvalidMAPError,
    NegativeEntry,
    Reducible,
    RowSumViolation,
    ZeroArrivalMatrix,
)
from .linalg import is_irreducible, stationary_vector

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MapSummary:
    alpha: np.ndarray
    rate: float


@dataclass(frozen=True, eq=False)
class MarkovianArrivalProcess:
    """Validated MAP. Build one with :func:`validate`, :func:`poisson` or :func:`erlang`."""

    c: np.ndarray
    d: np.ndarray

    @property
    def order(self) -> int:
        return self.c.shape[0]

    @cached_property
    def generator(self) -> np.ndarray:
        return self.c + self.d

    @cached_property
    def summary(self) -> MapSummary:
        alpha = stationary_vector(self.generator)
        alpha.setflags(write=False)
        return MapSummary(alpha=alpha, rate=float(alpha @ self.d.sum(axis=1)))

    def __eq__(self, other):
        if not isinstance(other, MarkovianArrivalProcess):
            return NotImplemented
        return np.array_equal(self.c, other.c) and np.array_equal(self.d, other.d)

    def __hash__(self):
        return hash((self.c.tobytes(), self.d.tobytes()))

    def to_dict(self) -> dict:
        return {"c": self.c.tolist(), "d": self.d.tolist()}


def validate(c, d) -> MarkovianArrivalProcess:
    """Check ``(c, d)`` against the MAP axioms and return an immutable MAP.

    Never repairs its input: any violation raises.

    Raises:
        DimensionError: shapes disagree or are not square.
        NegativeEntry: ``d`` has a negative entry, ``c`` a negative
            off-diagonal entry, or a nonnegative diagonal entry.
        ZeroArrivalMatrix: ``d`` is identically zero.
        RowSumViolation: a row of ``c + d`` does not sum to zero.
        Reducible: ``c + d`` is not irreducible.
    """
    c = np.atleast_2d(np.array(c, dtype=float))
    d = np.atleast_2d(np.array(d, dtype=float))
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DimensionError(f"C must be square, got {c.shape}")
    if d.shape != c.shape:
        raise DimensionError(f"C and D must have the same shape, got {c.shape} and {d.shape}")
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(d))):
        raise InvalidMAPError("non-finite entry in C or D")
    if np.any(d < 0):
        raise NegativeEntry("D has a negative entry")
    off = c - np.diag(np.diag(c))
    if np.any(off < 0):
        raise NegativeEntry("C has a negative off-diagonal entry")
    if np.any(np.diag(c) >= 0):
        raise NegativeEntry("C must have a strictly negative diagonal")
    if not np.any(d > 0):
        raise ZeroArrivalMatrix("D is identically zero")
    rows = (c + d).sum(axis=1)
    worst = int(np.argmax(np.abs(rows)))
    scale = max(1.0, float(np.abs(np.diag(c)).max()))
    if abs(rows[worst]) > ROW_SUM_TOL * scale:
        raise RowSumViolation(worst, float(rows[worst]))
    if not is_irreducible(c + d):
        raise Reducible("C + D is reducible")
    c.setflags(write=False)
    d.setflags(write=False)
    return MarkovianArrivalProcess(c, d)


def poisson(rate: float) -> MarkovianArrivalProcess:
    if not rate > 0:
        raise InvalidMAPError(f"Poisson rate must be positive, got {rate}")
    return validate([[-rate]], [[rate]])


def erlang(stages: int, stage_rate: float) -> MarkovianArrivalProcess:
    """Renewal MAP with Erlang(stages, stage_rate) interarrival times."""
    if int(stages) != stages or stages < 1:
        raise InvalidMAPError(f"stages must be a positive integer, got {stages}")
    if not stage_rate > 0:
        raise InvalidMAPError(f"stage rate must be positive, got {stage_rate}")
    stages = int(stages)
    c = -stage_rate * np.eye(stages) + stage_rate * np.eye(stages, k=1)
    d = np.zeros((stages, stages))
    d[-1, 0] = stage_rate
    return validate(c, d)


def summarize(process: MarkovianArrivalProcess) -> MapSummary:
    """Stationary phase vector and arrival rate ``alpha D e``."""
    return process.summary
