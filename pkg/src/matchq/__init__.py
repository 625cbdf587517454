"""Double-ended queue with MAP inputs and impatient customers.

Typical use::

    from matchq import poisson, QueueModel, solve, report, build_bound

    model = QueueModel(poisson(5.0), poisson(41 / 9), theta1=0.25, theta2=1.0)
    sol = solve(model)
    print(report(sol).p_no_a, build_bound(model, sol).mean_xi)
"""

from .errors import (
    DimensionError,
    InvalidMAPError,
    MatchQError,
    NonConvergentError,
    NotIrreducibleError,
    NotStableError,
    ScheduleExhaustedError,
    SingularMatrixError,
)
from .maps import MarkovianArrivalProcess, MapSummary, erlang, poisson, summarize, validate
from .model import LevelBlocks, QueueModel, blocks_at, drift_rates
from .oracle import birth_death_solve, direct_truncated_solve
from .performance import PerformanceReport, report
from .qbd import SolverConfig, TruncatedStationarySolution, solve
from .simulator import SimConfig, SimReport, simulate
from .sojourn import SojournBound, build_bound, cdf, prob_immediate
from .stability import Recurrence, RecurrenceClass, classify, classify_model

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "InvalidMAPError", "MatchQError", "NonConvergentError",
    "NotIrreducibleError", "NotStableError", "ScheduleExhaustedError", "SingularMatrixError",
    "MarkovianArrivalProcess", "MapSummary", "erlang", "poisson", "summarize", "validate",
    "LevelBlocks", "QueueModel", "blocks_at", "drift_rates",
    "birth_death_solve", "direct_truncated_solve",
    "PerformanceReport", "report",
    "SolverConfig", "TruncatedStationarySolution", "solve",
    "SimConfig", "SimReport", "simulate",
    "SojournBound", "build_bound", "cdf", "prob_immediate",
    "Recurrence", "RecurrenceClass", "classify", "classify_model",
]
