"""Double-ended queue with two MAP inputs and exponential impatience.

The level is ``N = N1 - N2`` (A-customers minus B-customers waiting); the
phase is ``(J2, J1)`` with the B-phase as the outer Kronecker index. At
level ``k`` the generator row is ``(down, local, up)``:

    k >= 1:  A2(k) = D2 (x) I + k th1 I,  A1(k) = C2 (+) C1 - k th1 I,  A0 = I (x) D1
    k == 0:  B0(0) = D2 (x) I,            B1(0) + A1(0) = C2 (x) I + I (x) C1,  A0(0)
    k <= -1: B0(k) = D2 (x) I,            B1(k) = C2 (+) C1 + k th2 I,  B2(k) = I (x) D1 - k th2 I
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .linalg import kron_product, kron_sum
from .maps import MarkovianArrivalProcess


@dataclass(frozen=True)
class LevelBlocks:
    level: int
    down: np.ndarray
    local: np.ndarray
    up: np.ndarray


@dataclass(frozen=True)
class QueueModel:
    map_a: MarkovianArrivalProcess
    map_b: MarkovianArrivalProcess
    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", float(self.theta1))
        object.__setattr__(self, "theta2", float(self.theta2))
        for name in ("theta1", "theta2"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be a finite nonnegative rate, got {value}")

    @property
    def order(self) -> int:
        return self.map_a.order * self.map_b.order

    @property
    def lambda1(self) -> float:
        return self.map_a.summary.rate

    @property
    def lambda2(self) -> float:
        return self.map_b.summary.rate

    @cached_property
    def _parts(self):
        c1, d1 = self.map_a.c, self.map_a.d
        c2, d2 = self.map_b.c, self.map_b.d
        i1, i2 = np.eye(c1.shape[0]), np.eye(c2.shape[0])
        return {
            "a_arrival": kron_product(i2, d1),
            "b_arrival": kron_product(d2, i1),
            "phase": kron_sum(c2, c1),
            "level0_local": kron_product(c2, i1) + kron_product(i2, c1),
        }

    def blocks_at(self, k: int) -> LevelBlocks:
        return _blocks_at(self, int(k))

    def mirrored(self) -> "QueueModel":
        """Same queue with the roles of A- and B-customers exchanged."""
        return QueueModel(self.map_b, self.map_a, self.theta2, self.theta1)

    def drift_rates(self, k: int) -> tuple[float, float]:
        return drift_rates(self, k)

    def __hash__(self):
        return hash((self.map_a, self.map_b, self.theta1, self.theta2))

    def __eq__(self, other):
        if not isinstance(other, QueueModel):
            return NotImplemented
        return (self.map_a == other.map_a and self.map_b == other.map_b
                and self.theta1 == other.theta1 and self.theta2 == other.theta2)


@lru_cache(maxsize=8192)
def _blocks_at(model: QueueModel, k: int) -> LevelBlocks:
    p = model._parts
    eye = np.eye(model.order)
    if k >= 1:
        down = p["b_arrival"] + k * model.theta1 * eye
        local = p["phase"] - k * model.theta1 * eye
        up = p["a_arrival"]
    elif k <= -1:
        down = p["b_arrival"]
        local = p["phase"] + k * model.theta2 * eye
        up = p["a_arrival"] - k * model.theta2 * eye
    else:
        down = p["b_arrival"]
        local = p["level0_local"]
        up = p["a_arrival"]
    for arr in (down, local, up):
        arr.setflags(write=False)
    return LevelBlocks(k, down, local, up)


def blocks_at(model: QueueModel, k: int) -> LevelBlocks:
    return model.blocks_at(k)


def drift_rates(model: QueueModel, k: int) -> tuple[float, float]:
    """Stationary-phase mean (up, down) rates at level ``k != 0``."""
    if k == 0:
        raise ValueError("level 0 has no single drift pair")
    lam1, lam2 = model.lambda1, model.lambda2
    if k >= 1:
        return lam1, lam2 + k * model.theta1
    return lam1 + (-k) * model.theta2, lam2
