"""Dense matrix kernels used by the QBD solver.

Block orders in this package are tiny (m1*m2 rarely above 100), so every
routine here is a direct dense computation on numpy arrays.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .errors import DimensionError, NotIrreducibleError, SingularMatrixError

SINGULAR_RTOL = 1e-12
POISSON_TAIL = 1e-12
# max uniformization rate*time per step; keeps exp(-x) well above underflow
_MAX_STEP_MASS = 30.0


def kron_product(a, b) -> np.ndarray:
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def kron_sum(a, b) -> np.ndarray:
    """Kronecker sum ``a (+) b = a (x) I_n + I_m (x) b``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise DimensionError(f"kron_sum needs square inputs, got {a.shape} and {b.shape}")
    return np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)


def _lu(a: np.ndarray, where: str):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).sum(axis=1).max() if a.size else 0.0
    threshold = SINGULAR_RTOL * scale
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivots = np.abs(np.diag(lu))
    smallest = float(pivots.min()) if pivots.size else 0.0
    if scale == 0.0 or smallest <= threshold:
        raise SingularMatrixError(smallest, threshold, where)
    return lu, piv


def solve_linear(a, b, where: str = "") -> np.ndarray:
    """Solve ``a x = b`` by LU with partial pivoting.

    Raises:
        SingularMatrixError: a pivot is at or below ``1e-12 * ||a||_inf``.
    """
    lu_piv = _lu(a, where)
    return scipy.linalg.lu_solve(lu_piv, np.asarray(b, dtype=float))


def right_solve(b, a, where: str = "") -> np.ndarray:
    """Return ``b a^{-1}`` (row-side solve) without forming the inverse."""
    lu_piv = _lu(np.asarray(a, dtype=float).T, where)
    return scipy.linalg.lu_solve(lu_piv, np.asarray(b, dtype=float).T).T


def is_irreducible(q) -> bool:
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if q.shape[0] == 1:
        return True
    pattern = (q != 0) & ~np.eye(q.shape[0], dtype=bool)
    n, _ = connected_components(pattern, directed=True, connection="strong")
    return n == 1


def stationary_vector(q) -> np.ndarray:
    """Stationary distribution of an irreducible generator ``q``.

    The last balance equation is replaced by the normalization row.
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    m = q.shape[0]
    if q.shape != (m, m):
        raise DimensionError(f"generator must be square, got {q.shape}")
    if not is_irreducible(q):
        raise NotIrreducibleError("generator is reducible")
    a = q.copy()
    a[:, -1] = 1.0
    rhs = np.zeros(m)
    rhs[-1] = 1.0
    try:
        alpha = right_solve(rhs, a, "stationary_vector")
    except SingularMatrixError as exc:
        raise NotIrreducibleError(f"degenerate generator: {exc}") from exc
    # roundoff can leave -1e-17 entries
    alpha = np.where(np.abs(alpha) < 1e-15, 0.0, alpha)
    if np.any(alpha < 0):
        raise NotIrreducibleError("stationary solve produced negative mass")
    return alpha / alpha.sum()


def exp_action(t_mat, v, t: float) -> np.ndarray:
    """Row-vector action ``v exp(t_mat * t)`` by uniformization.

    ``t_mat`` must be a (sub)generator. Long horizons are split into
    sub-steps so the Poisson weights never underflow; each sub-step is
    truncated once the remaining Poisson tail mass drops below 1e-12.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    t_mat = np.atleast_2d(np.asarray(t_mat, dtype=float))
    v = np.asarray(v, dtype=float).copy()
    if t == 0:
        return v
    rate = float(np.max(np.abs(np.diag(t_mat))))
    if rate == 0.0:
        return v
    p = np.eye(t_mat.shape[0]) + t_mat / rate
    total = rate * t
    steps = max(1, math.ceil(total / _MAX_STEP_MASS))
    x = total / steps
    for _ in range(steps):
        weight = math.exp(-x)
        term = v
        acc = weight * term
        mass = weight
        n = 0
        while 1.0 - mass > POISSON_TAIL:
            n += 1
            term = term @ p
            weight *= x / n
            acc = acc + weight * term
            mass += weight
            if n > 10_000:  # pragma: no cover - x is bounded by _MAX_STEP_MASS
                break
        v = acc
    return v
