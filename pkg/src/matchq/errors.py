"""Exception hierarchy shared by every module in the package."""


class MatchQError(Exception):
    """Base class for all errors raised by matchq."""


class DimensionError(MatchQError, ValueError):
    pass


class SingularMatrixError(MatchQError, ArithmeticError):
    """A direct solve hit a pivot below the singularity threshold."""

    def __init__(self, pivot: float, threshold: float, where: str = ""):
        self.pivot = pivot
        self.threshold = threshold
        self.where = where
        msg = f"singular matrix: |pivot|={pivot:.3e} <= {threshold:.3e}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class NotIrreducibleError(MatchQError, ValueError):
    pass


class InvalidMAPError(MatchQError, ValueError):
    pass


class RowSumViolation(InvalidMAPError):
    def __init__(self, row: int, value: float):
        self.row = row
        self.value = value
        super().__init__(f"row {row} of C+D sums to {value:.3e}, expected 0")


class NegativeEntry(InvalidMAPError):
    pass


class Reducible(InvalidMAPError, NotIrreducibleError):
    pass


class ZeroArrivalMatrix(InvalidMAPError):
    pass


class NotStableError(MatchQError):
    def __init__(self, recurrence):
        self.recurrence = recurrence
        super().__init__(f"model is not positive recurrent: {recurrence}")


class NonConvergentError(MatchQError, ArithmeticError):
    pass


class ScheduleExhaustedError(MatchQError):
    """No level in the truncation schedule met the tail-mass stop condition."""

    def __init__(self, tail_masses: dict):
        self.tail_masses = dict(tail_masses)
        last = max(self.tail_masses) if self.tail_masses else None
        detail = f"; last K={last} tail={self.tail_masses[last]:.3e}" if last is not None else ""
        super().__init__("truncation schedule exhausted" + detail)
