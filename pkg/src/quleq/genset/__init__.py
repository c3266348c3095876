"""Generating sets for filters of quasiorder lattices: synthesis and certificates."""

from .functions import boolean_generators, f_card, lasp, singleton_recovered, sperner_assignment
from .search import SearchFailed, search_quo_generators, tree_parameter

__all__ = [
    "lasp",
    "f_card",
    "boolean_generators",
    "sperner_assignment",
    "singleton_recovered",
    "tree_parameter",
    "search_quo_generators",
    "SearchFailed",
]
