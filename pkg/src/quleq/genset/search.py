"""Searches over small lattices: tree parameters and small generating sets of Quo(m)."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from ..errors import BadInput, BudgetExceeded
from ..poset import Poset
from ..quolattice import (
    ClosureResult,
    FiniteLattice,
    close_with_witnesses,
    enumerate_quleq,
    enumerate_quo,
    quo_pair,
    qum_pair,
)
from ..relation import QuasiRel

__all__ = [
    "TreeParam",
    "tree_parameter",
    "QuoGenerators",
    "SearchFailed",
    "search_quo_generators",
    "linear_order",
    "equivalence",
    "minimal_generating_size",
]


class SearchFailed(BudgetExceeded):
    """No generating set of the requested size was found within the budget."""


@dataclass
class TreeParam:
    value: int
    Y: list[QuasiRel] = field(default_factory=list)
    lattice_size: int | None = None


def tree_parameter(t: Poset, size_bound: int | None = 6, max_subsets: int = 2_000_000) -> TreeParam:
    """Tree parameter of a connected poset together with one witness set ``Y``.

    Singletons give 0 and chains 1.  Otherwise the filter above the order of ``t`` is
    enumerated and subsets ``Y`` are tried by increasing size until ``Y`` together with
    the reversed-cover atoms ``qum(y, x)`` generates it (bounds included); the value is
    ``|Y| + 1``.
    """
    if len(t.components) != 1:
        raise BadInput("tree parameter needs a connected poset")
    if t.n == 1:
        return TreeParam(0)
    if t.is_chain:
        return TreeParam(1)
    if size_bound is not None and t.n > size_bound:
        raise BudgetExceeded(f"tree parameter search refused: {t.n} elements exceeds bound {size_bound}")
    snap = enumerate_quleq(t)
    lat = FiniteLattice.from_relations(snap.elements)
    atoms = sorted({lat.index[qum_pair(t, y, x)] for x, y in t.covers})
    rest = [i for i in range(len(lat)) if i not in atoms]
    tried = 0
    for k in range(0, len(rest) + 1):
        for extra in combinations(rest, k):
            tried += 1
            if tried > max_subsets:
                raise BudgetExceeded(f"tree parameter search passed {max_subsets} subsets", estimate=tried)
            if lat.generates(atoms + list(extra)):
                return TreeParam(k + 1, [lat.elements[i] for i in extra], len(lat))
    raise AssertionError("the whole lattice always generates itself")


# -- generating sets of Quo(m) --------------------------------------------------------------


def linear_order(perm) -> QuasiRel:
    """The chain ``perm[0] < perm[1] < ...`` as a relation."""
    n = len(perm)
    rows = [0] * n
    for i, v in enumerate(perm):
        for w in perm[i:]:
            rows[v] |= 1 << w
    return QuasiRel(n, rows)


def equivalence(labels) -> QuasiRel:
    """Equivalence whose classes are the fibres of ``labels``."""
    n = len(labels)
    rows = [0] * n
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                rows[i] |= 1 << j
    return QuasiRel(n, rows)


@dataclass
class QuoGenerators:
    m: int
    generators: list[QuasiRel]
    target_size: int
    closure: ClosureResult | None  # binary closure that reached every atom
    relaxed: bool = False
    method: str = ""

    @property
    def size(self) -> int:
        return len(self.generators)

    def atom_terms(self) -> dict[tuple[int, int], object]:
        """Constant-free witness term for each atom ``quo(x, y)`` over the generators."""
        out = {}
        if self.closure is None:
            return out
        pairs = _atom_pairs(self.m)
        for t, el in self.closure.found.items():
            out[pairs[t]] = self.closure.term(el)
        return out


def _atom_pairs(m: int) -> list[tuple[int, int]]:
    return [(x, y) for x in range(m) for y in range(m) if x != y]


def _reach_atoms(gens, m, max_elements, max_seconds) -> ClosureResult:
    atoms = [quo_pair(m, x, y) for x, y in _atom_pairs(m)]
    return close_with_witnesses(gens, targets=atoms, max_elements=max_elements, max_seconds=max_seconds)


def _exhaustive(m: int, size: int, rng: random.Random, deadline: float):
    """Try every ``size``-subset of Quo(m) (in a seeded order) for complete generation."""
    elems = list(enumerate_quo(m).elements)
    lat = FiniteLattice.from_relations(elems)
    order = list(range(len(elems)))
    rng.shuffle(order)
    for combo in combinations(order, size):
        if time.monotonic() > deadline:
            return None
        if lat.generates(combo):
            return [elems[i] for i in combo]
    return None


def _hill_climb(m: int, size: int, rng: random.Random, deadline: float, eval_elements: int, eval_seconds: float):
    """Randomised local search over ``{L, L^-1, e_1, ..., e_r}`` with ``L`` the natural chain
    and ``e_i`` equivalences; fitness is (atoms reached, closure size)."""
    chain = linear_order(range(m))
    base = [chain, chain.inverse()]
    n_eq = size - 2
    if n_eq < 0:
        return None
    natoms = m * (m - 1)

    def fitness(labels):
        gens = base + [equivalence(lab) for lab in labels]
        res = _reach_atoms(gens, m, eval_elements, eval_seconds)
        return (natoms - len(res.missing), len(res.snapshot)), gens

    while time.monotonic() < deadline:
        labels = [[rng.randrange(m) for _ in range(m)] for _ in range(n_eq)]
        fit, gens = fitness(labels)
        for _ in range(8 * m * max(n_eq, 1)):
            if fit[0] == natoms or time.monotonic() > deadline:
                break
            cand = [lab[:] for lab in labels]
            if n_eq:
                e = rng.randrange(n_eq)
                cand[e][rng.randrange(m)] = rng.randrange(m)
            f2, g2 = fitness(cand)
            if f2 >= fit:
                labels, fit, gens = cand, f2, g2
        if fit[0] == natoms:
            return gens
    return None


def search_quo_generators(
    m: int,
    target_size: int,
    budget_secs: float = 120.0,
    seed: int = 0,
    relax: bool = True,
    eval_elements: int = 200_000,
    eval_seconds: float = 20.0,
) -> QuoGenerators:
    """A set of at most ``target_size`` quasiorders of ``range(m)`` generating Quo(m).

    Generation is certified by a binary meet/join closure that reaches every atom
    ``quo(x, y)``: each quasiorder is a join of atoms and the identity is the empty join.
    On failure the search is repeated once with ``target_size + 1`` (``relaxed`` is then
    set); if that also fails :class:`SearchFailed` is raised.
    """
    if m < 1:
        raise BadInput("need m >= 1")
    if m == 4 and target_size <= 4:
        raise BadInput("no 4-element generating set of Quo(4) is known; ask for 5")
    return _search_cached(m, target_size, budget_secs, seed, relax, eval_elements, eval_seconds)


@lru_cache(maxsize=64)
def _search_cached(m, target_size, budget_secs, seed, relax, eval_elements, eval_seconds) -> QuoGenerators:
    if m == 1:
        return QuoGenerators(1, [], target_size, None, method="trivial")
    rng = random.Random(seed)
    start = time.monotonic()
    sizes = [target_size, target_size + 1] if relax else [target_size]
    for attempt, size in enumerate(sizes):
        # the first size gets most of the budget, the relaxed size the rest
        share = 0.75 if attempt == 0 and len(sizes) > 1 else 1.0
        deadline = start + budget_secs * share if attempt == 0 else start + budget_secs
        gens = None
        method = ""
        if m == 2 and size >= 2:
            gens, method = [quo_pair(2, 0, 1), quo_pair(2, 1, 0)], "chain"
        elif m <= 3:
            gens, method = _exhaustive(m, size, rng, deadline), "exhaustive"
        else:
            gens, method = _hill_climb(m, size, rng, deadline, eval_elements, eval_seconds), "hill-climb"
        if gens is None:
            continue
        res = _reach_atoms(gens, m, None, None)
        if res.missing:
            continue
        return QuoGenerators(m, gens, target_size, res, relaxed=size != target_size, method=method)
    raise SearchFailed(f"no generating set of Quo({m}) with at most {sizes[-1]} elements found in {budget_secs}s")


def minimal_generating_size(lattice: FiniteLattice, max_size: int) -> tuple[int | None, list[int]]:
    """Smallest ``k <= max_size`` such that some ``k``-subset generates ``lattice`` (bounds
    included), with one such subset; ``(None, [])`` if there is none."""
    idx = range(len(lattice))
    for k in range(0, max_size + 1):
        for combo in combinations(idx, k):
            if lattice.generates(combo):
                return k, list(combo)
    return None, []
