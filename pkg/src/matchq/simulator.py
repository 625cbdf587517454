"""Discrete-event simulation of the double-ended queue.

Each MAP runs its own phase clock; an A-phase event either changes phase
or produces an A-arrival according to the rows of (C1, D1), and likewise
for B. Waiting customers of the nonempty side abandon through a single
aggregate clock of rate ``n * theta`` with a uniformly chosen victim. An
arrival matches the head of the opposite queue at once (FCFM).

Time averages of the level process and per-customer waits of A are
collected in equal-length batches after the warmup; confidence intervals
are Student-t batch means.
"""

from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .model import QueueModel
from .performance import FIELDS

STREAMS = ("arrivals_a", "arrivals_b", "abandonment", "victim")
_CHUNK = 1 << 14


@dataclass(frozen=True)
class SimConfig:
    horizon: float = 1e6
    warmup: float = 1e4
    seed: int = 0
    batches: int = 20

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be a positive finite time")
        if not (0 <= self.warmup < self.horizon):
            raise ValueError("warmup must satisfy 0 <= warmup < horizon")
        if int(self.batches) != self.batches or self.batches < 2:
            raise ValueError("batches must be an integer >= 2")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned value")


@dataclass(frozen=True)
class Estimate:
    value: float
    half_width: float

    def covers(self, x: float, widen: float = 1.0) -> bool:
        return abs(x - self.value) <= widen * self.half_width

    def __iter__(self):
        yield self.value
        yield self.half_width


@dataclass(frozen=True)
class SimReport:
    p_no_a: Estimate
    p_no_b: Estimate
    p_empty: Estimate
    mean_q_a: Estimate
    mean_q_b: Estimate
    mean_q_paper: Estimate
    mean_level_diff: Estimate
    mean_q_total_abs: Estimate
    mean_wait_a: Estimate
    abandon_frac_a: Estimate
    abandon_frac_b: Estimate
    events: int = 0
    config: SimConfig = field(default_factory=SimConfig, repr=False)

    def measures(self) -> dict[str, Estimate]:
        return {name: getattr(self, name) for name in FIELDS}

    def as_dict(self) -> dict:
        names = FIELDS + ("mean_wait_a", "abandon_frac_a", "abandon_frac_b")
        out = {name: {"estimate": getattr(self, name).value,
                      "half_width": getattr(self, name).half_width} for name in names}
        out["events"] = self.events
        return out


class _Stream:
    """Buffered draws from one Philox generator."""

    def __init__(self, seed_seq: np.random.SeedSequence):
        self._gen = np.random.Generator(np.random.Philox(seed_seq))
        self._exp: list[float] = []
        self._uni: list[float] = []

    def exp(self) -> float:
        if not self._exp:
            self._exp = self._gen.standard_exponential(_CHUNK).tolist()
        return self._exp.pop()

    def uniform(self) -> float:
        if not self._uni:
            self._uni = self._gen.random(_CHUNK).tolist()
        return self._uni.pop()


def _transition_table(c: np.ndarray, d: np.ndarray):
    """Per phase: total rate, cumulative probabilities, (next phase, arrival)."""
    table = []
    m = c.shape[0]
    for j in range(m):
        rate = -c[j, j]
        outcomes, probs = [], []
        for i in range(m):
            if i != j and c[j, i] > 0:
                outcomes.append((i, False))
                probs.append(c[j, i] / rate)
            if d[j, i] > 0:
                outcomes.append((i, True))
                probs.append(d[j, i] / rate)
        cum = np.cumsum(probs).tolist()
        cum[-1] = 1.0
        table.append((rate, cum, outcomes))
    return table


def _initial_phase(process, u: float) -> int:
    cum = np.cumsum(process.summary.alpha).tolist()
    return min(bisect.bisect_right(cum, u), len(cum) - 1)


def _run(model: QueueModel, config: SimConfig, observer: Callable | None = None):
    seeds = np.random.SeedSequence(int(config.seed)).spawn(len(STREAMS))
    rng_a, rng_b, rng_ab, rng_v = (_Stream(s) for s in seeds)
    tab_a = _transition_table(model.map_a.c, model.map_a.d)
    tab_b = _transition_table(model.map_b.c, model.map_b.d)
    th1, th2 = model.theta1, model.theta2
    inf = math.inf

    nb = int(config.batches)
    warmup, horizon = float(config.warmup), float(config.horizon)
    width = (horizon - warmup) / nb
    # per-batch integrals: n<=0, n>=0, n==0, n+, n-, n
    acc = np.zeros((nb, 6))
    wait_sum = [0.0] * nb
    wait_cnt = [0] * nb
    arr_a, arr_b = [0] * nb, [0] * nb
    ab_a, ab_b = [0] * nb, [0] * nb

    j1 = _initial_phase(model.map_a, rng_a.uniform())
    j2 = _initial_phase(model.map_b, rng_b.uniform())
    qa: deque[float] = deque()   # arrival times of waiting A-customers
    qb: deque[float] = deque()
    t = 0.0
    next_a = rng_a.exp() / tab_a[j1][0]
    next_b = rng_b.exp() / tab_b[j2][0]
    next_ab = inf
    batch = -1
    bound = warmup
    events = 0

    def batch_of(s: float) -> int:
        if s < warmup:
            return -1
        return min(int((s - warmup) / width), nb - 1)

    while True:
        t_next = min(next_a, next_b, next_ab)
        # integrate the current level over [t, min(t_next, horizon))
        n = len(qa) - len(qb)
        end = min(t_next, horizon)
        while t < end:
            seg_end = min(end, bound)
            if batch >= 0:
                dt = seg_end - t
                row = acc[batch]
                if n > 0:
                    row[1] += dt
                    row[3] += n * dt
                elif n < 0:
                    row[0] += dt
                    row[4] -= n * dt
                else:
                    row[0] += dt
                    row[1] += dt
                    row[2] += dt
                row[5] += n * dt
            t = seg_end
            if t >= bound and t < horizon:
                batch += 1
                bound = warmup + (batch + 1) * width if batch < nb - 1 else horizon
        if t_next >= horizon:
            break
        t = t_next
        events += 1
        k = batch_of(t)

        if t_next == next_a:
            rate, cum, outs = tab_a[j1]
            j1, arrival = outs[bisect.bisect_right(cum, rng_a.uniform())]
            nr = tab_a[j1][0]
            next_a = t + rng_a.exp() / nr if nr > 0 else inf
            if arrival:
                if k >= 0:
                    arr_a[k] += 1
                if qb:
                    qb.popleft()
                    if k >= 0:
                        wait_cnt[k] += 1
                else:
                    qa.append(t)
                next_ab = _abandon_clock(t, qa, qb, th1, th2, rng_ab)
        elif t_next == next_b:
            rate, cum, outs = tab_b[j2]
            j2, arrival = outs[bisect.bisect_right(cum, rng_b.uniform())]
            nr = tab_b[j2][0]
            next_b = t + rng_b.exp() / nr if nr > 0 else inf
            if arrival:
                if k >= 0:
                    arr_b[k] += 1
                if qa:
                    _depart_a(qa.popleft(), t, batch_of, wait_sum, wait_cnt)
                else:
                    qb.append(t)
                next_ab = _abandon_clock(t, qa, qb, th1, th2, rng_ab)
        else:
            if qa:
                i = min(int(rng_v.uniform() * len(qa)), len(qa) - 1)
                t_arr = qa[i]
                del qa[i]
                _depart_a(t_arr, t, batch_of, wait_sum, wait_cnt)
                b = batch_of(t_arr)
                if b >= 0:
                    ab_a[b] += 1
            else:
                i = min(int(rng_v.uniform() * len(qb)), len(qb) - 1)
                t_arr = qb[i]
                del qb[i]
                b = batch_of(t_arr)
                if b >= 0:
                    ab_b[b] += 1
            next_ab = _abandon_clock(t, qa, qb, th1, th2, rng_ab)
        if observer is not None:
            observer(t, len(qa), len(qb), j1, j2)

    return acc, width, wait_sum, wait_cnt, arr_a, arr_b, ab_a, ab_b, events


def _abandon_clock(t, qa, qb, th1, th2, rng) -> float:
    rate = len(qa) * th1 + len(qb) * th2
    return t + rng.exp() / rate if rate > 0 else math.inf


def _depart_a(t_arr, t, batch_of, wait_sum, wait_cnt):
    b = batch_of(t_arr)
    if b >= 0:
        wait_sum[b] += t - t_arr
        wait_cnt[b] += 1


def _estimate(samples) -> Estimate:
    x = np.asarray(samples, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) < 2:
        return Estimate(float(x.mean()) if len(x) else math.nan, math.inf)
    q = stats.t.ppf(0.975, len(x) - 1)
    return Estimate(float(x.mean()), float(q * x.std(ddof=1) / math.sqrt(len(x))))


def _ratio(num, den) -> np.ndarray:
    num, den = np.asarray(num, float), np.asarray(den, float)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)


def simulate(model: QueueModel, config: SimConfig | None = None,
             observer: Callable | None = None) -> SimReport:
    """Simulate ``model`` and return batch-means estimates with 95% half-widths.

    ``observer(t, n_a, n_b, j1, j2)`` is called after every event if given.
    """
    config = config or SimConfig()
    acc, width, wsum, wcnt, arr_a, arr_b, ab_a, ab_b, events = _run(model, config, observer)
    avg = acc / width
    p_no_a, p_no_b, p_empty, qa, qb, diff = avg.T
    paper = qa * (1.0 - p_no_a) + qb * (1.0 - p_no_b)
    return SimReport(
        p_no_a=_estimate(p_no_a),
        p_no_b=_estimate(p_no_b),
        p_empty=_estimate(p_empty),
        mean_q_a=_estimate(qa),
        mean_q_b=_estimate(qb),
        mean_q_paper=_estimate(paper),
        mean_level_diff=_estimate(diff),
        mean_q_total_abs=_estimate(qa + qb),
        mean_wait_a=_estimate(_ratio(wsum, wcnt)),
        abandon_frac_a=_estimate(_ratio(ab_a, arr_a)),
        abandon_frac_b=_estimate(_ratio(ab_b, arr_b)),
        events=events,
        config=config,
    )
