"""Finite posets: construction, decomposition into components, and the numeric parameters
that size the generating sets (component size/count/edge number/extremal number, the two
selector components and the correction number)."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import BadInput, CycleError
from .relation import QuasiRel, close_rows

__all__ = [
    "Poset",
    "Component",
    "PosetParams",
    "build_poset",
    "antichain",
    "chain",
    "y_poset",
    "cardinal_sum",
    "figure1",
    "figure2",
    "compute_params",
    "quotient_by_theta",
]


def _find_cycle(n: int, succ: list[list[int]]) -> list[int] | None:
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if color[w] == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(succ[w])))
                    break
                if color[w] == 1:
                    cyc = [w]
                    u = v
                    while u != w:
                        cyc.append(u)
                        u = parent[u]
                    cyc.reverse()
                    return [w] + cyc[:-1] + [w] if len(cyc) > 1 else [w, w]
            else:
                color[v] = 2
                stack.pop()
    return None


@dataclass(frozen=True)
class Component:
    """One connectivity class of a poset, with its edges and extremal elements."""

    index: int
    elements: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    maxima: tuple[int, ...]
    minima: tuple[int, ...]

    @property
    def iedges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((y, x) for x, y in self.edges))

    @property
    def extremals(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.maxima) | set(self.minima)))

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def is_chain(self) -> bool:
        return len(self.edges) == len(self.elements) - 1 and len(self.maxima) == 1 and len(self.minima) == 1


class Poset:
    """A finite poset on ``0..n-1`` given by its cover relation.

    ``order`` is the reflexive-transitive closure of the covers; ``covers`` is always the
    transitive reduction, sorted.
    """

    def __init__(self, n: int, covers: Iterable[tuple[int, int]], labels: Sequence[str] | None = None):
        covers = [tuple(c) for c in covers]
        for x, y in covers:
            if not (0 <= x < n and 0 <= y < n):
                raise BadInput(f"cover ({x}, {y}) references an element outside [0, {n})")
        succ = [[] for _ in range(n)]
        for x, y in covers:
            succ[x].append(y)
        cycle = _find_cycle(n, succ)
        if cycle is not None:
            raise CycleError(cycle)
        rows = [0] * n
        for x, y in covers:
            rows[x] |= 1 << y
        self.n = n
        self.order = QuasiRel(n, close_rows(rows))
        self.covers = tuple(sorted(self._reduction()))
        if labels is not None and len(labels) != n:
            raise BadInput("labels must name every element")
        self.labels = tuple(labels) if labels is not None else None

    def _reduction(self) -> list[tuple[int, int]]:
        rows = self.order.rows
        strict = [r & ~(1 << i) for i, r in enumerate(rows)]
        out = []
        for x in range(self.n):
            above = strict[x]
            implied = 0
            y, rest = 0, above
            while rest:
                if rest & 1:
                    implied |= strict[y]
                rest >>= 1
                y += 1
            cov = above & ~implied
            y = 0
            while cov:
                if cov & 1:
                    out.append((x, y))
                cov >>= 1
                y += 1
        return out

    # order queries ----------------------------------------------------
    def leq(self, x: int, y: int) -> bool:
        return bool(self.order.rows[x] >> y & 1)

    def lt(self, x: int, y: int) -> bool:
        return x != y and self.leq(x, y)

    def comparable(self, x: int, y: int) -> bool:
        return self.leq(x, y) or self.leq(y, x)

    def up(self, x: int) -> int:
        """Bitmask of the principal filter of ``x``."""
        return self.order.rows[x]

    @cached_property
    def _columns(self) -> tuple[int, ...]:
        return tuple(self.order.column(j) for j in range(self.n))

    def down(self, x: int) -> int:
        """Bitmask of the principal ideal of ``x``."""
        return self._columns[x]

    @property
    def mu(self) -> QuasiRel:
        return self.order

    @cached_property
    def length(self) -> int:
        if self.n == 0:
            return 0
        succ = [[] for _ in range(self.n)]
        indeg = [0] * self.n
        for x, y in self.covers:
            succ[x].append(y)
            indeg[y] += 1
        longest = [0] * self.n
        queue = [v for v in range(self.n) if indeg[v] == 0]
        while queue:
            v = queue.pop()
            for w in succ[v]:
                longest[w] = max(longest[w], longest[v] + 1)
                indeg[w] -= 1
                if indeg[w] == 0:
                    queue.append(w)
        return max(longest)

    # structure ----------------------------------------------------------
    @cached_property
    def components(self) -> tuple[Component, ...]:
        parent = list(range(self.n))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for x, y in self.covers:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        ordered = sorted(groups.values(), key=lambda g: g[0])
        has_up = [False] * self.n
        has_down = [False] * self.n
        for x, y in self.covers:
            has_up[x] = True
            has_down[y] = True
        comps = []
        for idx, elems in enumerate(ordered):
            es = set(elems)
            comps.append(
                Component(
                    index=idx,
                    elements=tuple(elems),
                    edges=tuple(c for c in self.covers if c[0] in es),
                    maxima=tuple(v for v in elems if not has_up[v]),
                    minima=tuple(v for v in elems if not has_down[v]),
                )
            )
        return tuple(comps)

    @cached_property
    def component_of(self) -> tuple[int, ...]:
        out = [0] * self.n
        for comp in self.components:
            for v in comp.elements:
                out[v] = comp.index
        return tuple(out)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self.covers

    @property
    def iedges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((y, x) for x, y in self.covers))

    @property
    def extremals(self) -> tuple[int, ...]:
        return tuple(sorted(v for c in self.components for v in c.extremals))

    @property
    def is_forest(self) -> bool:
        return len(self.covers) == self.n - len(self.components)

    @property
    def is_chain(self) -> bool:
        return self.n > 0 and len(self.components) == 1 and self.components[0].is_chain

    def subposet(self, elements: Sequence[int]) -> "Poset":
        """Induced subposet, relabelled to ``0..len(elements)-1`` in the given order."""
        index = {v: i for i, v in enumerate(elements)}
        covers = [(index[x], index[y]) for x, y in self.covers if x in index and y in index]
        labels = [self.label(v) for v in elements]
        return Poset(len(elements), covers, labels)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        out = {"n": self.n, "covers": [list(c) for c in self.covers]}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Poset":
        try:
            n = int(data["n"])
            covers = [(int(a), int(b)) for a, b in data.get("covers", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise BadInput(f"malformed poset document: {exc}") from None
        return cls(n, covers, data.get("labels"))

    @classmethod
    def loads(cls, text: str) -> "Poset":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BadInput(f"poset document is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.n == other.n and self.covers == other.covers

    def __hash__(self) -> int:
        return hash((self.n, self.covers))

    def __repr__(self) -> str:
        return f"Poset(n={self.n}, covers={list(self.covers)})"


def build_poset(covers: Iterable[tuple[int, int]], n: int, labels=None) -> Poset:
    return Poset(n, covers, labels)


def antichain(m: int) -> Poset:
    return Poset(m, [])


def chain(length: int) -> Poset:
    """Chain of the given length, i.e. with ``length + 1`` elements."""
    if length < 0:
        raise BadInput("chain length must be non-negative")
    return Poset(length + 1, [(i, i + 1) for i in range(length)])


def y_poset() -> Poset:
    return Poset(4, [(0, 1), (1, 2), (1, 3)], ["0", "a", "b", "c"])


def cardinal_sum(posets: Sequence[Poset]) -> Poset:
    """Disjoint union; summand ``k`` is shifted past the carriers of summands ``0..k-1``."""
    posets = list(posets)
    if not posets:
        raise BadInput("cardinal sum needs at least one summand")
    covers, labels, offset = [], [], 0
    for k, p in enumerate(posets):
        covers.extend((x + offset, y + offset) for x, y in p.covers)
        labels.extend(f"{p.label(v)}_{k}" for v in range(p.n))
        offset += p.n
    return Poset(offset, covers, labels)


def _tree(covers: list[tuple[int, int]], n: int) -> Poset:
    return Poset(n, covers)


def figure1() -> Poset:
    """A 7-tree forest with component size 6, edge number 5, extremal number 4 and two
    chain components as selectors."""
    parts = [
        chain(1),
        chain(2),
        _tree([(0, 1), (1, 2), (1, 3), (0, 4), (4, 5)], 6),  # 6 elements, 5 edges, 4 extremals
        y_poset(),
        _tree([(0, 1), (0, 2), (2, 3), (2, 4)], 5),  # 3 maxima + 1 minimum
        _tree([(0, 2), (1, 2), (2, 3), (3, 4)], 5),
        _tree([(0, 1), (1, 2), (1, 3)], 4),
    ]
    return cardinal_sum(parts)


def figure2() -> Poset:
    """A 14-tree forest of chains: two singletons plus chains of up to five elements."""
    lengths = [0, 0, 4, 4, 3, 3, 2, 2, 1, 1, 4, 3, 2, 1]
    return cardinal_sum([chain(k) for k in lengths])


@dataclass
class PosetParams:
    ncs: int
    ncmp: int
    ncedge: int
    ncextr: int
    is_forest: bool
    selectors: tuple[int, int] | None = None
    ntp1: int | None = None
    ntp2: int | None = None
    tree_params: dict[int, int] = field(default_factory=dict)

    @property
    def ncorr(self) -> int | None:
        if self.ntp1 is None or self.ntp2 is None:
            return None
        return self.ntp1 + self.ntp2

    def to_dict(self) -> dict:
        return {
            "ncs": self.ncs,
            "ncmp": self.ncmp,
            "ncedge": self.ncedge,
            "ncextr": self.ncextr,
            "is_forest": self.is_forest,
            "selectors": list(self.selectors) if self.selectors else None,
            "ntp1": self.ntp1,
            "ntp2": self.ntp2,
            "ncorr": self.ncorr,
        }


def compute_params(p: Poset, ntp_size_bound: int = 6) -> PosetParams:
    """All component parameters of ``p``; selectors only when there are at least 3 components.

    Tree parameters are computed lazily: singletons and chains are known in closed form,
    other components get the lower bound 1 and are only searched when that bound could
    decide the selector choice.  Ties go to fewer elements, then smaller component index.
    """
    from .genset.search import tree_parameter

    comps = p.components
    params = PosetParams(
        ncs=max((c.size for c in comps), default=0),
        ncmp=len(comps),
        ncedge=max((len(c.edges) for c in comps), default=0),
        ncextr=max((len(c.extremals) for c in comps), default=0),
        is_forest=p.is_forest,
    )
    if len(comps) < 3:
        return params

    def closed_form(c: Component) -> int | None:
        if c.size == 1:
            return 0
        if c.is_chain:
            return 1
        return None

    heap = []
    for c in comps:
        known = closed_form(c)
        heap.append(((known if known is not None else 1), c.size, c.index, known is not None))
    heapq.heapify(heap)
    chosen = []
    while len(chosen) < 2:
        value, size, idx, exact = heapq.heappop(heap)
        if exact:
            chosen.append((idx, value))
            params.tree_params[idx] = value
            continue
        sub = p.subposet(comps[idx].elements)
        exact_value = tree_parameter(sub, size_bound=ntp_size_bound).value
        heapq.heappush(heap, (exact_value, size, idx, True))
    params.selectors = (chosen[0][0], chosen[1][0])
    params.ntp1, params.ntp2 = chosen[0][1], chosen[1][1]
    return params


def quotient_by_theta(mu: QuasiRel) -> tuple[Poset, list[int]]:
    """Collapse the equivalence ``mu ∩ mu^-1`` of a quasiorder and return the induced poset
    on the blocks together with the element-to-block map."""
    if not mu.closed:
        raise BadInput("quotient_by_theta expects a quasiorder")
    n = mu.n
    block = [-1] * n
    reps = []
    for x in range(n):
        if block[x] >= 0:
            continue
        b = len(reps)
        reps.append(x)
        for y in range(x, n):
            if (x, y) in mu and (y, x) in mu:
                block[y] = b
    m = len(reps)
    rows = [0] * m
    for x, y in mu.pairs():
        rows[block[x]] |= 1 << block[y]
    covers = []
    order = QuasiRel(m, rows)
    for a in range(m):
        for b in range(m):
            if a != b and (a, b) in order:
                if not any(c not in (a, b) and (a, c) in order and (c, b) in order for c in range(m)):
                    covers.append((a, b))
    return Poset(m, covers), block
