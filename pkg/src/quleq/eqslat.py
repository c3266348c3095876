"""Equation systems over finite lattices and the reduction from restricted CNF.

A restricted CNF has clauses of two kinds only: three positive literals, or two negative
literals.  ``reduce_cnfhk`` turns such a formula into four lattice equations that are
solvable over a lattice ``L`` exactly when the formula is satisfiable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import BadInput, BudgetExceeded
from .latterm import Const, EvalContext, FuncOps, LatTerm, Var, evaluate, join_of, meet_of, parse, size, to_text, variables
from .quolattice import FiniteLattice, enumerate_quo

__all__ = [
    "table_lattice",
    "chain_lattice",
    "n5",
    "m3",
    "quo2",
    "TEST_LATTICES",
    "EqSystem",
    "CnfHK",
    "solve_brute",
    "reduce_cnfhk",
    "sat_brute",
    "lift_solution",
    "all_instances",
    "parse_equations",
    "format_equations",
    "parse_cnf",
    "format_cnf",
]


# -- small lattices ----------------------------------------------------------------------


def table_lattice(names: Sequence[str], leq_pairs: Sequence[tuple[str, str]]) -> FiniteLattice:
    """Lattice from element names and a generating set of ``a <= b`` pairs."""
    names = list(names)
    idx = {s: i for i, s in enumerate(names)}
    m = len(names)
    leq = np.eye(m, dtype=bool)
    for a, b in leq_pairs:
        leq[idx[a], idx[b]] = True
    for k in range(m):
        leq |= leq[:, k : k + 1] & leq[k : k + 1, :]
    meet_t = np.zeros((m, m), dtype=np.int32)
    join_t = np.zeros((m, m), dtype=np.int32)
    for a in range(m):
        for b in range(m):
            lower = [c for c in range(m) if leq[c, a] and leq[c, b]]
            upper = [c for c in range(m) if leq[a, c] and leq[b, c]]
            glb = [c for c in lower if all(leq[d, c] for d in lower)]
            lub = [c for c in upper if all(leq[c, d] for d in upper)]
            if len(glb) != 1 or len(lub) != 1:
                raise BadInput(f"{names[a]} and {names[b]} lack a meet or a join")
            meet_t[a, b], join_t[a, b] = glb[0], lub[0]
    return FiniteLattice(names, meet_t, join_t, names)


def chain_lattice(k: int) -> FiniteLattice:
    names = ["0", "1"] if k == 2 else ["0"] + [f"c{i}" for i in range(1, k - 1)] + ["1"]
    return table_lattice(names, list(zip(names, names[1:])))


def n5() -> FiniteLattice:
    """The pentagon: 0 < a < c < 1 and 0 < b < 1 with b incomparable to a and c."""
    return table_lattice(["0", "a", "b", "c", "1"], [("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")])


def m3() -> FiniteLattice:
    """The diamond: three pairwise incomparable atoms between 0 and 1."""
    return table_lattice(["0", "a", "b", "c", "1"], [("0", x) for x in "abc"] + [(x, "1") for x in "abc"])


def quo2() -> FiniteLattice:
    """Quo of a 2-element set: identity ``D``, ``01``, ``10`` and the full relation ``N``."""
    rels = enumerate_quo(2).elements
    lat = FiniteLattice.from_relations(rels)
    names = []
    for r in rels:
        extra = [f"{x}{y}" for x, y in r.pairs() if x != y]
        names.append("D" if not extra else ("N" if len(extra) == 2 else extra[0]))
    lat.names = names
    return lat


TEST_LATTICES = {
    "chain2": lambda: chain_lattice(2),
    "chain3": lambda: chain_lattice(3),
    "N5": n5,
    "M3": m3,
    "Quo2": quo2,
}


def _table_ops(lat: FiniteLattice) -> FuncOps:
    mt, jt = lat.meet_table, lat.join_table
    return FuncOps(lambda a, b: mt[a, b], lambda a, b: jt[a, b])


def _value(lat: FiniteLattice, v) -> int:
    if isinstance(v, str):
        if v not in lat.names:
            raise BadInput(f"unknown lattice element {v!r}")
        return lat.names.index(v)
    v = int(v)
    if not 0 <= v < len(lat):
        raise BadInput(f"element index {v} outside the lattice")
    return v


# -- systems ------------------------------------------------------------------------------


@dataclass
class EqSystem:
    """Equations ``term_i = u_i`` over ``lattice``; unknowns are the variables listed in
    ``unknowns`` (a variable index may be negative, e.g. ``-1`` for ``xm1``)."""

    lattice: FiniteLattice
    equations: list[tuple[LatTerm, int]]
    unknowns: list[int] = field(default_factory=list)
    constants: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.equations = [(t, _value(self.lattice, u)) for t, u in self.equations]
        used = set()
        for t, _ in self.equations:
            used |= variables(t)
        if not self.unknowns:
            self.unknowns = sorted(used)
        missing = used - set(self.unknowns)
        if missing:
            raise BadInput(f"terms use variables outside the unknowns: {sorted(missing)}")

    @property
    def k(self) -> int:
        return len(self.unknowns)

    @property
    def b(self) -> int:
        return len(self.equations)

    def holds(self, assignment: dict[int, int]) -> bool:
        ctx = EvalContext(assignment, _table_ops(self.lattice), self.constants)
        return all(int(evaluate(t, ctx)) == u for t, u in self.equations)

    def term_nodes(self) -> int:
        return sum(size(t) for t, _ in self.equations)


@dataclass
class Solution:
    status: str  # "solved" or "unsolvable"
    assignment: dict[int, int] | None = None
    checked: int = 0

    @property
    def solvable(self) -> bool:
        return self.status == "solved"


def solve_brute(system: EqSystem, budget: int = 10**7, chunk: int = 1 << 16) -> Solution:
    """First solution in lexicographic order of assignments (first unknown most
    significant), or a proof of unsolvability by exhausting ``L^k``."""
    lat = system.lattice
    size_l, k = len(lat), system.k
    total = size_l**k
    if total > budget:
        raise BudgetExceeded(f"|L|^k = {size_l}^{k} = {total} exceeds the budget {budget}", estimate=total)
    ops = _table_ops(lat)
    weights = size_l ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        digits = (codes[:, None] // weights) % size_l
        assign = {v: digits[:, i] for i, v in enumerate(system.unknowns)}
        ctx = EvalContext(assign, ops, system.constants)
        ok = np.ones(len(codes), dtype=bool)
        memo: dict = {}
        for t, u in system.equations:
            ok &= np.broadcast_to(evaluate(t, ctx, memo), ok.shape) == u
            if not ok.any():
                break
        hits = np.nonzero(ok)[0]
        if len(hits):
            row = digits[hits[0]]
            return Solution("solved", {v: int(row[i]) for i, v in enumerate(system.unknowns)}, lo + int(hits[0]) + 1)
    return Solution("unsolvable", None, total)


# -- restricted CNF ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CnfHK:
    """Clauses ``(x_i v x_j v x_k)`` (``pos_clauses``) and ``(~x_i v ~x_j)``
    (``neg_clauses``) over variables ``1..m``."""

    m: int
    pos_clauses: tuple[tuple[int, int, int], ...] = ()
    neg_clauses: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.m < 0:
            raise BadInput("variable count must be non-negative")
        object.__setattr__(self, "pos_clauses", tuple(tuple(c) for c in self.pos_clauses))
        object.__setattr__(self, "neg_clauses", tuple(tuple(c) for c in self.neg_clauses))
        for kind, clauses, arity in (("positive", self.pos_clauses, 3), ("negative", self.neg_clauses, 2)):
            for c in clauses:
                if len(c) != arity:
                    raise BadInput(f"{kind} clause {c} must have exactly {arity} variables")
                if len(set(c)) != arity:
                    raise BadInput(f"{kind} clause {c} repeats a variable")
                for i in c:
                    if not 1 <= i <= self.m:
                        raise BadInput(f"variable {i} in clause {c} outside 1..{self.m}")

    def evaluate(self, g: Sequence[int]) -> bool:
        """Truth value under ``g`` (``g[i-1]`` is the value of variable ``i``)."""
        return all(g[i - 1] or g[j - 1] or g[k - 1] for i, j, k in self.pos_clauses) and all(
            not (g[i - 1] and g[j - 1]) for i, j in self.neg_clauses
        )

    def p1(self, var=Var) -> LatTerm | None:
        """Meet over the positive clauses of the join of their variables."""
        if not self.pos_clauses:
            return None
        return meet_of(*[join_of(*[var(i) for i in c]) for c in self.pos_clauses])

    def p2(self, var=Var) -> LatTerm | None:
        """Join over the negative clauses of the meet of their variables."""
        if not self.neg_clauses:
            return None
        return join_of(*[meet_of(*[var(i) for i in c]) for c in self.neg_clauses])

    @property
    def length(self) -> int:
        return 3 * len(self.pos_clauses) + 2 * len(self.neg_clauses)


def sat_brute(h: CnfHK, max_vars: int = 24) -> tuple[int, ...] | None:
    """First satisfying assignment in lexicographic order (variable 1 most significant),
    or ``None``.  The clause-level truth value is cross-checked against the two terms
    evaluated over the 2-element lattice."""
    m = h.m
    if m > max_vars:
        raise BudgetExceeded(f"sat_brute handles at most {max_vars} variables, got {m}")
    codes = np.arange(1 << m, dtype=np.int64)
    bits = {i: ((codes >> (m - i)) & 1).astype(bool) for i in range(1, m + 1)}
    ops = FuncOps(np.logical_and, np.logical_or)
    ctx = EvalContext(bits, ops)
    ones = np.ones(len(codes), dtype=bool)
    p1 = h.p1()
    p2 = h.p2()
    v1 = np.broadcast_to(evaluate(p1, ctx), ones.shape) if p1 is not None else ones
    v2 = np.broadcast_to(evaluate(p2, ctx), ones.shape) if p2 is not None else ~ones
    direct = ones.copy()
    for c in h.pos_clauses:
        direct &= bits[c[0]] | bits[c[1]] | bits[c[2]]
    for c in h.neg_clauses:
        direct &= ~(bits[c[0]] & bits[c[1]])
    if not np.array_equal(direct, v1 & ~v2):
        raise AssertionError("clause evaluation disagrees with the term evaluation")
    hits = np.nonzero(direct)[0]
    if not len(hits):
        return None
    g = int(hits[0])
    return tuple((g >> (m - i)) & 1 for i in range(1, m + 1))


X_LOW, X_HIGH = -1, 0  # the auxiliary unknowns xm1 and x0


def masked(i: int) -> LatTerm:
    """``(x_i v xm1) ^ x0``: pushes any value of ``x_i`` into the interval [xm1, x0]."""
    return meet_of(join_of(Var(i), Var(X_LOW)), Var(X_HIGH))


def reduce_cnfhk(h: CnfHK, lattice: FiniteLattice, a0, a1) -> EqSystem:
    """Four equations ``xm1 = a0, x0 = a1, p1 = a1, p2 = a0`` in ``m + 2`` unknowns whose
    solvability over ``lattice`` matches the satisfiability of ``h``.

    ``p1``/``p2`` are the clause terms applied to the masked variables.  With no clause of
    one kind the empty meet (join) is replaced by the constant ``#a1`` (``#a0``), the top
    (bottom) of the interval.
    """
    a0, a1 = _value(lattice, a0), _value(lattice, a1)
    if not lattice.covers(a0, a1):
        raise BadInput(f"{lattice.names[a0]} is not covered by {lattice.names[a1]}")
    p1 = h.p1(masked)
    p2 = h.p2(masked)
    equations = [
        (Var(X_LOW), a0),
        (Var(X_HIGH), a1),
        (p1 if p1 is not None else Const("a1"), a1),
        (p2 if p2 is not None else Const("a0"), a0),
    ]
    unknowns = [X_LOW, X_HIGH] + list(range(1, h.m + 1))
    return EqSystem(lattice, equations, unknowns, {"a0": a0, "a1": a1})


def lift_solution(h: CnfHK, lattice: FiniteLattice, a0, a1, g: Sequence[int]) -> dict[int, int]:
    """The lattice assignment ``(a0, a1, g_1', ..., g_m')`` with ``g_i' = a1`` if ``g_i``
    is true and ``a0`` otherwise."""
    a0, a1 = _value(lattice, a0), _value(lattice, a1)
    out = {X_LOW: a0, X_HIGH: a1}
    for i, gi in enumerate(g, start=1):
        out[i] = a1 if gi else a0
    return out


def all_instances(m_max: int = 4, max_pos: int = 2, max_neg: int = 2):
    """Every restricted CNF with ``1 <= m <= m_max`` and at most ``max_pos`` positive and
    ``max_neg`` negative distinct clauses."""
    for m in range(1, m_max + 1):
        pos_all = list(combinations(range(1, m + 1), 3))
        neg_all = list(combinations(range(1, m + 1), 2))
        for np_ in range(max_pos + 1):
            for pos in combinations(pos_all, np_):
                for nn in range(max_neg + 1):
                    for neg in combinations(neg_all, nn):
                        yield CnfHK(m, pos, neg)


# -- file formats -----------------------------------------------------------------------------

_EQ_LINE = re.compile(r"^(?P<term>.+?)\s*=\s*(?P<value>[^=\s]+)\s*$")


def parse_equations(text: str, lattice: FiniteLattice, constants: dict | None = None) -> EqSystem:
    """One equation per line, ``<term> = <element name>``; blank lines are skipped.
    ``constants`` maps constant names (``#name`` in terms) to element names."""
    equations = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        m = _EQ_LINE.match(line)
        if m is None:
            raise BadInput(f"line {lineno}: expected '<term> = <value>'")
        try:
            term = parse(m.group("term"))
        except BadInput as exc:
            raise BadInput(f"line {lineno}: {exc}") from None
        equations.append((term, m.group("value")))
    if not equations:
        raise BadInput("no equations")
    consts = {k: _value(lattice, v) for k, v in (constants or {}).items()}
    return EqSystem(lattice, equations, constants=consts)


def format_equations(system: EqSystem) -> str:
    names = system.lattice.names
    return "".join(f"{to_text(t)} = {names[u]}\n" for t, u in system.equations)


def parse_cnf(text: str, m: int | None = None) -> CnfHK:
    """Lines ``P i j k`` (positive clause) and ``N i j`` (negative clause)."""
    pos, neg = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        tag, args = parts[0], parts[1:]
        try:
            nums = tuple(int(a) for a in args)
        except ValueError:
            raise BadInput(f"line {lineno}: clause variables must be integers") from None
        if tag == "P":
            pos.append(nums)
        elif tag == "N":
            neg.append(nums)
        else:
            raise BadInput(f"line {lineno}: unknown clause kind {tag!r}")
    used = [i for c in pos + neg for i in c]
    if m is None:
        m = max(used, default=0)
    return CnfHK(m, tuple(pos), tuple(neg))


def format_cnf(h: CnfHK) -> str:
    lines = [f"P {i} {j} {k}" for i, j, k in h.pos_clauses] + [f"N {i} {j}" for i, j in h.neg_clauses]
    return "".join(line + "\n" for line in lines)
