"""Stationary distribution of the bilateral level-dependent QBD.

The bilateral chain is split at level 0 into an upward half (levels >= 1,
A-customers waiting) and a downward half (levels <= -1, B-customers
waiting). Each half gets its own family of rate matrices:

    R_k   (k >= 1):  pi_{k+1} = pi_k R_k
    RR_k  (k <= -1): pi_{k-1} = pi_k RR_k

The deepest matrix of each family comes from the Bright-Taylor doubling
series; the rest follow by a backward sweep toward level 0. The three
boundary vectors are then fixed by the balance equations at levels -1, 0
and 1, and the truncation level K grows along a schedule until the mass
at levels +-(K+1) is below ``epsilon``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergentError, NotStableError, ScheduleExhaustedError
from .linalg import right_solve, solve_linear
from .model import QueueModel
from .stability import classify_model

log = logging.getLogger(__name__)

MAX_DOUBLINGS = 64


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-20
    level_schedule: tuple[int, ...] | None = None
    series_tol: float = 1e-14
    max_schedule_steps: int = 50
    schedule_step: int = 10

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.level_schedule is not None:
            sched = tuple(int(k) for k in self.level_schedule)
            if not sched or sched[0] < 2 or any(b <= a for a, b in zip(sched, sched[1:])):
                raise ValueError("level_schedule must be strictly increasing and start at >= 2")
            object.__setattr__(self, "level_schedule", sched)
        if self.schedule_step < 2:
            raise ValueError("schedule_step must be >= 2")

    def levels(self) -> tuple[int, ...]:
        if self.level_schedule is not None:
            return self.level_schedule[: self.max_schedule_steps]
        return tuple(self.schedule_step * (n + 1) for n in range(self.max_schedule_steps))


@dataclass(frozen=True)
class _Side:
    """Blocks of one half of the chain indexed by distance ``n >= 1`` from level 0.

    ``away`` moves one level further from 0, ``toward`` one level closer.
    """

    away: Callable[[int], np.ndarray]
    local: Callable[[int], np.ndarray]
    toward: Callable[[int], np.ndarray]


def _upper_side(model: QueueModel) -> _Side:
    return _Side(
        away=lambda n: model.blocks_at(n).up,
        local=lambda n: model.blocks_at(n).local,
        toward=lambda n: model.blocks_at(n).down,
    )


def _lower_side(model: QueueModel) -> _Side:
    return _Side(
        away=lambda n: model.blocks_at(-n).down,
        local=lambda n: model.blocks_at(-n).local,
        toward=lambda n: model.blocks_at(-n).up,
    )


def _bright_taylor(side: _Side, k: int, tol: float) -> np.ndarray:
    """Doubling series for the rate matrix at distance ``k`` from level 0.

    U[l, n] is the censored probability-flux matrix for a jump from n to
    n + 2^l, D[l, n] for a jump from n to n - 2^l.
    """
    if k < 1:
        raise ValueError("Bright-Taylor series needs a level k >= 1")
    up: dict[tuple[int, int], np.ndarray] = {}
    dn: dict[tuple[int, int], np.ndarray] = {}
    m = side.local(k).shape[0]
    eye = np.eye(m)

    def U(l: int, n: int) -> np.ndarray:
        key = (l, n)
        val = up.get(key)
        if val is None:
            if l == 0:
                val = right_solve(side.away(n), -side.local(n + 1), f"U^0_{n}")
            else:
                h = 1 << (l - 1)
                mid = U(l - 1, n + h)
                loop = eye - U(l - 1, n + 2 * h) @ D(l - 1, n + 3 * h) - D(l - 1, n + 2 * h) @ mid
                val = right_solve(U(l - 1, n) @ mid, loop, f"U^{l}_{n}")
            up[key] = val
        return val

    def D(l: int, n: int) -> np.ndarray:
        key = (l, n)
        val = dn.get(key)
        if val is None:
            if l == 0:
                val = right_solve(side.toward(n), -side.local(n - 1), f"D^0_{n}")
            else:
                h = 1 << (l - 1)
                mid = D(l - 1, n - h)
                loop = eye - U(l - 1, n - 2 * h) @ mid - D(l - 1, n - 2 * h) @ U(l - 1, n - 3 * h)
                val = right_solve(D(l - 1, n) @ mid, loop, f"D^{l}_{n}")
            dn[key] = val
        return val

    r = U(0, k).copy()
    prod = eye
    for l in range(1, MAX_DOUBLINGS + 1):
        prod = D(l - 1, k + (1 << l)) @ prod
        term = U(l, k) @ prod
        r += term
        if np.abs(term).sum(axis=1).max() < tol:
            return r
    raise NonConvergentError(f"Bright-Taylor series at level {k} did not converge in {MAX_DOUBLINGS} doublings")


def bright_taylor_r(model: QueueModel, k: int, tol: float = 1e-14) -> np.ndarray:
    """Rate matrix R_k (level k >= 1) from the Bright-Taylor series."""
    return _bright_taylor(_upper_side(model), k, tol)


def bright_taylor_r_neg(model: QueueModel, k: int, tol: float = 1e-14) -> np.ndarray:
    """Rate matrix RR_k (level k <= -1) from the mirrored series."""
    if k > -1:
        raise ValueError("negative-side series needs a level k <= -1")
    return _bright_taylor(_lower_side(model), -k, tol)


def _sweep(side: _Side, r_terminal: np.ndarray, depth: int) -> list[np.ndarray]:
    """Return [R_1, ..., R_depth] (by distance) given R_depth."""
    family = [None] * depth
    family[-1] = np.asarray(r_terminal, dtype=float)
    for n in range(depth - 1, 0, -1):
        rhs = -side.local(n + 1) - family[n] @ side.toward(n + 2)
        family[n - 1] = right_solve(side.away(n), rhs, f"R_{n}")
    return family


def backward_sweep(model: QueueModel, r_terminal: np.ndarray, level: int) -> list[np.ndarray]:
    """Rate matrices from ``level`` back toward 0.

    For ``level = K > 0`` returns ``[R_1, ..., R_K]``; for ``level = -K``
    returns ``[RR_-1, ..., RR_-K]``. The terminal matrix is included last.
    """
    if level >= 1:
        return _sweep(_upper_side(model), r_terminal, level)
    if level <= -1:
        return _sweep(_lower_side(model), r_terminal, -level)
    raise ValueError("level must be nonzero")


def solve_boundary(model: QueueModel, r1: np.ndarray, r_neg1: np.ndarray):
    """Unnormalized vectors at levels -1, 0, 1 with total mass 1.

    Solves the balance equations of the three boundary levels; the last
    scalar equation of the level-1 block is replaced by the normalization.
    """
    m = model.order
    bm2, bm1, b0, b1, b2 = (model.blocks_at(k) for k in (-2, -1, 0, 1, 2))
    z = np.zeros((m, m))
    # x = [pi_-1, pi_0, pi_1]; x @ M = 0, block column j = balance of level j-1
    M = np.block([
        [r_neg1 @ bm2.up + bm1.local, bm1.up, z],
        [b0.down, b0.local, b0.up],
        [z, b1.down, b1.local + r1 @ b2.down],
    ])
    M[:, -1] = 1.0
    rhs = np.zeros(3 * m)
    rhs[-1] = 1.0
    x = solve_linear(M.T, rhs, "boundary system")
    return x[:m], x[m:2 * m], x[2 * m:]


def _products(start: np.ndarray, family: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = [start]
    for r in family:
        out.append(out[-1] @ r)
    return out


def normalize(model: QueueModel, vectors, r_plus, r_minus, K: int | None = None) -> float:
    """Normalization constant over levels -(K+1)..K+1."""
    pm1, p0, p1 = vectors
    if K is None:
        K = min(len(r_plus), len(r_minus))
    upper = _products(p1, r_plus[:K])
    lower = _products(pm1, r_minus[:K])
    total = sum(v.sum() for v in upper) + sum(v.sum() for v in lower) + p0.sum()
    return 1.0 / total


@dataclass
class TruncatedStationarySolution:
    model: QueueModel
    config: SolverConfig
    k_star: int
    r_plus: list[np.ndarray]
    r_minus: list[np.ndarray]
    boundary: tuple[np.ndarray, np.ndarray, np.ndarray]
    c: float
    pi: np.ndarray = field(repr=False)
    tail_mass: float = 0.0
    history: dict[int, float] = field(default_factory=dict)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(-self.k_star - 1, self.k_star + 2)

    def level(self, k: int) -> np.ndarray:
        if abs(k) > self.k_star + 1:
            raise IndexError(f"level {k} outside the truncated range")
        return self.pi[k + self.k_star + 1]

    def level_mass(self) -> np.ndarray:
        return self.pi.sum(axis=1)

    def R(self, k: int) -> np.ndarray:
        """R_k for k >= 1, RR_k for k <= -1."""
        return self.r_plus[k - 1] if k > 0 else self.r_minus[-k - 1]


def _solve_at(model: QueueModel, K: int, config: SolverConfig) -> TruncatedStationarySolution:
    r_top = bright_taylor_r(model, K, config.series_tol)
    r_bottom = bright_taylor_r_neg(model, -K, config.series_tol)
    r_plus = backward_sweep(model, r_top, K)
    r_minus = backward_sweep(model, r_bottom, -K)
    boundary = solve_boundary(model, r_plus[0], r_minus[0])
    c = normalize(model, boundary, r_plus, r_minus, K)
    pm1, p0, p1 = boundary
    upper = _products(c * p1, r_plus)      # levels 1..K+1
    lower = _products(c * pm1, r_minus)    # levels -1..-(K+1)
    pi = np.vstack(lower[::-1] + [c * p0] + upper)
    tail = float(np.abs(pi[0]).sum() + np.abs(pi[-1]).sum())
    return TruncatedStationarySolution(
        model=model, config=config, k_star=K, r_plus=r_plus, r_minus=r_minus,
        boundary=boundary, c=c, pi=pi, tail_mass=tail,
    )


def solve(model: QueueModel, config: SolverConfig | None = None) -> TruncatedStationarySolution:
    """Run the truncation schedule until the tail mass falls below epsilon.

    Raises:
        NotStableError: the model is not positive recurrent.
        ScheduleExhaustedError: no scheduled level met the stop condition.
    """
    config = config or SolverConfig()
    verdict = classify_model(model)
    if not verdict.positive:
        raise NotStableError(verdict)
    history: dict[int, float] = {}
    for K in config.levels():
        sol = _solve_at(model, K, config)
        history[K] = sol.tail_mass
        log.debug("K=%d tail mass %.3e", K, sol.tail_mass)
        if sol.tail_mass < config.epsilon:
            sol.history = history
            return sol
    raise ScheduleExhaustedError(history)
