"""Independent reference solutions used to check the matrix-analytic solver.

Two backends:

* ``birth_death_solve``: product-form probabilities of the scalar chain
  obtained when both inputs are Poisson.
* ``direct_truncated_solve``: global balance of the full truncated block
  generator, assembled level by level and solved in one dense system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotStableError
from .linalg import solve_linear
from .model import QueueModel
from .stability import classify


@dataclass(frozen=True)
class BirthDeathSolution:
    levels: np.ndarray
    p: np.ndarray
    normalizer: float

    def prob(self, k: int) -> float:
        return float(self.p[k - self.levels[0]])


def birth_death_solve(lambda1: float, lambda2: float, theta1: float, theta2: float,
                      K: int, tail_tol: float = 1e-16) -> BirthDeathSolution:
    """Stationary law of the scalar level process on ``-K..K``.

    Ratios are accumulated in log space so deep truncations do not underflow.

    Raises:
        ValueError: ``K`` is too small for the end probabilities to fall
            below ``tail_tol``.
    """
    if not (theta1 > 0 and theta2 > 0):
        raise ValueError("birth_death_solve needs both impatience rates positive")
    K = int(K)
    ks = np.arange(1, K + 1)
    log_up = np.cumsum(np.log(lambda1) - np.log(lambda2 + ks * theta1))
    log_dn = np.cumsum(np.log(lambda2) - np.log(lambda1 + ks * theta2))
    logp = np.concatenate([log_dn[::-1], [0.0], log_up])
    shift = logp.max()
    w = np.exp(logp - shift)
    total = w.sum()
    p = w / total
    if max(p[0], p[-1]) >= tail_tol:
        raise ValueError(f"K={K} too small: end mass {max(p[0], p[-1]):.3e} >= {tail_tol:g}")
    return BirthDeathSolution(np.arange(-K, K + 1), p, float(np.exp(-shift) / total))


def truncated_generator(model: QueueModel, K: int) -> np.ndarray:
    """Dense generator on levels ``-K..K`` with the outermost flows reflected."""
    m = model.order
    L = 2 * K + 1
    Q = np.zeros((L * m, L * m))
    for i, k in enumerate(range(-K, K + 1)):
        b = model.blocks_at(k)
        s = slice(i * m, (i + 1) * m)
        Q[s, s] += b.local
        if i > 0:
            Q[s, (i - 1) * m:i * m] += b.down
        else:
            Q[s, s] += np.diag(b.down.sum(axis=1))
        if i < L - 1:
            Q[s, (i + 1) * m:(i + 2) * m] += b.up
        else:
            Q[s, s] += np.diag(b.up.sum(axis=1))
    return Q


def direct_truncated_solve(model: QueueModel, K: int) -> np.ndarray:
    """Per-level stationary vectors, shape ``(2K+1, m)``, levels ``-K..K``."""
    verdict = classify(model.lambda1, model.lambda2, model.theta1, model.theta2)
    if not verdict.positive:
        raise NotStableError(verdict)
    Q = truncated_generator(model, K)
    A = Q.T.copy()
    A[-1, :] = 1.0
    rhs = np.zeros(len(Q))
    rhs[-1] = 1.0
    x = solve_linear(A, rhs, "truncated global balance")
    return x.reshape(2 * K + 1, model.order)
