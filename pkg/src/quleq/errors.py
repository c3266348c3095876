"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class QuleqError(Exception):
    """Base class for all errors raised by this package."""


class BadInput(QuleqError, ValueError):
    """Malformed or out-of-contract input (exit code 4)."""


class CycleError(BadInput):
    """The cover digraph handed to a poset builder is not acyclic."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cover relation contains a cycle: " + " -> ".join(map(str, self.cycle)))


class BudgetExceeded(QuleqError):
    """A configured element/time budget was hit before the computation finished (exit code 3)."""

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class VerificationFailed(QuleqError):
    """A mathematical check failed (exit code 2)."""
