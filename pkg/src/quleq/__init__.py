"""Finite posets, quasiorder lattices and small generating sets of their filters."""

from .errors import BadInput, BudgetExceeded, CycleError, QuleqError, VerificationFailed
from .poset import Poset, antichain, build_poset, cardinal_sum, chain, compute_params, figure1, figure2, y_poset
from .relation import QuasiRel

__version__ = "0.1.0"

__all__ = [
    "BadInput",
    "BudgetExceeded",
    "CycleError",
    "QuleqError",
    "VerificationFailed",
    "Poset",
    "QuasiRel",
    "antichain",
    "build_poset",
    "cardinal_sum",
    "chain",
    "compute_params",
    "figure1",
    "figure2",
    "y_poset",
]
