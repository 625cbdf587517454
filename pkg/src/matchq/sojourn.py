"""Phase-type upper bound on the sojourn time of an A-customer.

The bound is the first passage time from the stationary level down to
level 0. Levels <= 0 are collapsed into one absorbing state, so the
passage time is phase-type with initial vector ``(pi_1, pi_2, ...)`` and
the block-tridiagonal subgenerator ``T`` of levels >= 1. Its mean
``alpha (-T)^{-1} e`` is computed from the UL-type factorization

    T = (I - R_U) U_D (I - G_L)

with two block-bidiagonal sweeps and one block-diagonal solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import exp_action, right_solve, solve_linear
from .model import QueueModel
from .qbd import SolverConfig, TruncatedStationarySolution, bright_taylor_r, solve


@dataclass
class SojournBound:
    model: QueueModel
    K: int
    alpha0: float
    alpha_vec: np.ndarray = field(repr=False)       # (K, m): pi_1 .. pi_K
    u_family: list[np.ndarray] = field(repr=False)  # U_1 .. U_K
    r_family: list[np.ndarray] = field(repr=False)  # R_1 .. R_{K-1}
    g_family: list[np.ndarray] = field(repr=False)  # G_2 .. G_K
    r_terminal: np.ndarray = field(repr=False)      # R_K from the doubling series
    mean_xi: float = 0.0
    neglected_mass: float = 0.0

    def U(self, k: int) -> np.ndarray:
        return self.u_family[k - 1]

    def R(self, k: int) -> np.ndarray:
        return self.r_family[k - 1]

    def G(self, k: int) -> np.ndarray:
        return self.g_family[k - 2]

    def absorbing_generator(self) -> tuple[np.ndarray, np.ndarray]:
        return absorbing_generator(self.model, self.K)

    def reassemble(self) -> np.ndarray:
        """Dense ``(I - R_U) U_D (I - G_L)`` over levels 1..K."""
        m = self.model.order
        K = self.K
        upper = np.eye(K * m)
        lower = np.eye(K * m)
        diag = np.zeros((K * m, K * m))
        for i in range(K):
            s = slice(i * m, (i + 1) * m)
            diag[s, s] = self.u_family[i]
            if i + 1 < K:
                t = slice((i + 1) * m, (i + 2) * m)
                upper[s, t] = -self.r_family[i]
                lower[t, s] = -self.g_family[i]
        return upper @ diag @ lower


def absorbing_generator(model: QueueModel, K: int, reflect: bool = True):
    """Truncated subgenerator ``T`` on levels 1..K and its exit vector.

    With ``reflect`` the upward flow out of level K stays in level K, so
    ``T e + T0 = 0`` holds exactly on the truncation.
    """
    m = model.order
    T = np.zeros((K * m, K * m))
    for i, k in enumerate(range(1, K + 1)):
        b = model.blocks_at(k)
        s = slice(i * m, (i + 1) * m)
        T[s, s] = b.local
        if i > 0:
            T[s, slice((i - 1) * m, i * m)] = b.down
        if i + 1 < K:
            T[s, slice((i + 1) * m, (i + 2) * m)] = b.up
        elif reflect:
            T[s, s] += np.diag(b.up.sum(axis=1))
    exit_vec = np.zeros(K * m)
    exit_vec[:m] = model.blocks_at(1).down.sum(axis=1)
    return T, exit_vec


def _factor(model: QueueModel, K: int, r_terminal: np.ndarray):
    blk = model.blocks_at
    u = [None] * K
    r = [None] * (K - 1)
    u[K - 1] = blk(K).local + r_terminal @ blk(K + 1).down
    for l in range(K - 1, 0, -1):
        r[l - 1] = right_solve(blk(l).up, -u[l], f"R_{l}")
        u[l - 1] = blk(l).local + r[l - 1] @ blk(l + 1).down
    g = [solve_linear(-u[l - 1], blk(l).down, f"G_{l}") for l in range(2, K + 1)]
    return u, r, g


def _mean_from_factors(alpha_vec, u, r, g) -> float:
    K = len(u)
    m = u[0].shape[0]
    # y = (I - R_U)^{-1} e, backward
    y = [None] * K
    y[K - 1] = np.ones(m)
    for i in range(K - 2, -1, -1):
        y[i] = 1.0 + r[i] @ y[i + 1]
    # w = alpha (I - G_L)^{-1}, backward over the lower-bidiagonal columns
    w = [None] * K
    w[K - 1] = alpha_vec[K - 1]
    for i in range(K - 2, -1, -1):
        w[i] = alpha_vec[i] + w[i + 1] @ g[i]
    return -float(sum(w[i] @ solve_linear(u[i], y[i], f"U_{i + 1}") for i in range(K)))


def build_bound(model: QueueModel, sol: TruncatedStationarySolution, K: int | None = None) -> SojournBound:
    """Factor the absorbing generator at ``K`` (default ``sol.k_star``) and
    evaluate the mean first passage time to level 0."""
    K = sol.k_star if K is None else int(K)
    if K < 1 or K > sol.k_star + 1:
        raise ValueError(f"K must lie in 1..{sol.k_star + 1}")
    mass = sol.level_mass()
    levels = sol.levels
    alpha0 = float(mass[levels <= 0].sum())
    alpha_vec = np.array([sol.level(k) for k in range(1, K + 1)])
    neglected = float(mass[levels > K].sum())
    r_terminal = bright_taylor_r(model, K, sol.config.series_tol)
    u, r, g = _factor(model, K, r_terminal)
    mean_xi = _mean_from_factors(alpha_vec, u, r, g)
    return SojournBound(
        model=model, K=K, alpha0=alpha0, alpha_vec=alpha_vec,
        u_family=u, r_family=r, g_family=g, r_terminal=r_terminal,
        mean_xi=mean_xi, neglected_mass=neglected,
    )


def prob_immediate(bound: SojournBound) -> float:
    return bound.alpha0


def survival(bound: SojournBound, t: float) -> float:
    """``alpha exp(T t) e`` on the reflected truncation."""
    T, _ = bound.absorbing_generator()
    return float(exp_action(T, bound.alpha_vec.ravel(), t).sum())


def cdf(bound: SojournBound, t: float) -> float:
    """``P(xi <= t) = 1 - alpha0 - alpha exp(T t) e``.

    ``1 - alpha0`` is taken as the initial mass above level 0, which makes
    ``cdf(0) == 0`` exactly and ``cdf(inf) == 1 - alpha0`` up to the
    truncation tail.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    return float(bound.alpha_vec.sum()) - survival(bound, t)


def cdf_grid(bound: SojournBound, times) -> np.ndarray:
    """CDF at increasing times, stepping the exponential action forward."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be nonnegative and nondecreasing")
    T, _ = bound.absorbing_generator()
    v = bound.alpha_vec.ravel().copy()
    above = v.sum()
    out = np.empty_like(times)
    prev = 0.0
    for i, t in enumerate(times):
        v = exp_action(T, v, t - prev)
        prev = t
        out[i] = above - v.sum()
    return out


def b_side_bound(model: QueueModel, config: SolverConfig | None = None) -> SojournBound:
    """Bound for B-customers: the same construction on the mirrored queue."""
    mirror = model.mirrored()
    return build_bound(mirror, solve(mirror, config))
