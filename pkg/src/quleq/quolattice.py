"""Quasiorder lattices Quo(n) and their filters above a partial order.

Meets are intersections, joins are reflexive-transitive closures of unions.  This module
also enumerates these lattices and closes generator sets under meet/join while keeping
enough provenance to rebuild a witness term for every element reached.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import batch
from .errors import BadInput, BudgetExceeded
from .latterm import Const, LatTerm, Var, join_of, meet_of
from .poset import Poset, antichain
from .relation import QuasiRel, big_join, close_rows, join, meet

__all__ = [
    "QUO_OPS",
    "quo_pair",
    "qum_pair",
    "qum_set",
    "nabla_plus",
    "phi_embed",
    "enumerate_quo",
    "enumerate_quleq",
    "count_quleq",
    "QUO_SIZES",
    "LatticeSnapshot",
    "ClosureResult",
    "close_with_witnesses",
    "FiniteLattice",
]

# |Quo(n)| (OEIS A000798); used for refusal estimates.
QUO_SIZES = {
    0: 1,
    1: 1,
    2: 4,
    3: 29,
    4: 355,
    5: 6942,
    6: 209527,
    7: 9535241,
    8: 642779354,
    9: 61864214663,
    10: 8281189041372,
}


class _RelOps:
    meet = staticmethod(meet)
    join = staticmethod(join)


QUO_OPS = _RelOps()


def quo_pair(n: int, x: int, y: int) -> QuasiRel:
    """Least quasiorder of ``{0..n-1}`` containing ``(x, y)``."""
    return QuasiRel.from_pairs(n, [(x, y)]).closure()


def qum_pair(p: Poset, x: int, y: int) -> QuasiRel:
    """Least quasiorder extending the order of ``p`` and containing ``(x, y)``:
    the order together with (down-set of x) x (up-set of y)."""
    rows = list(p.order.rows)
    up_y = p.up(y)
    down_x = p.down(x)
    a = 0
    while down_x:
        if down_x & 1:
            rows[a] |= up_y
        down_x >>= 1
        a += 1
    return QuasiRel(p.n, rows)


def qum_set(p: Poset, gamma: Iterable[tuple[int, int]]) -> QuasiRel:
    rows = list(p.order.rows)
    for x, y in gamma:
        if not (0 <= x < p.n and 0 <= y < p.n):
            raise BadInput(f"pair ({x}, {y}) outside the carrier")
        rows[x] |= 1 << y
    return QuasiRel(p.n, close_rows(rows))


def nabla_plus(p: Poset, elements: Iterable[int]) -> QuasiRel:
    """The order of ``p`` together with the full relation on ``elements``."""
    elements = list(elements)
    mask = 0
    for v in elements:
        mask |= 1 << v
    rows = list(p.order.rows)
    for v in elements:
        rows[v] |= mask
    return QuasiRel(p.n, close_rows(rows))


def phi_embed(p: Poset, X: Sequence[int], rho: QuasiRel) -> QuasiRel:
    """Transport a quasiorder ``rho`` of ``X`` (indexed ``0..len(X)-1``) into the filter of
    ``p``: first extend by the diagonal of ``p``, then join with the order of ``p``.

    ``X`` must meet every component of ``p`` in at most one element.
    """
    X = list(X)
    if rho.n != len(X):
        raise BadInput("rho must be indexed by the positions of X")
    if len(set(X)) != len(X):
        raise BadInput("X has repeated elements")
    comps = [p.component_of[v] for v in X]
    if len(set(comps)) != len(comps):
        raise BadInput("X meets some component in more than one element")
    # rho extended by the diagonal of P
    rows = [1 << v for v in range(p.n)]
    for i, j in rho.pairs():
        rows[X[i]] |= 1 << X[j]
    # join with the order of P
    rows = [a | b for a, b in zip(rows, p.order.rows)]
    return QuasiRel(p.n, close_rows(rows))


# -- enumeration ----------------------------------------------------------------


def _dfs_quasiorders(base: QuasiRel, limit: int | None, emit):
    """Depth-first enumeration of every quasiorder containing the quasiorder ``base``.

    Pairs are decided in row-major order; adding a pair to a closed relation uses the
    closed form (down-set x up-set), and a branch dies when it hits a forbidden pair.
    """
    n = base.n
    undecided = [(i, j) for i in range(n) for j in range(n) if i != j and not (base.rows[i] >> j & 1)]
    count = 0
    rows0 = list(base.rows)
    forb0 = [0] * n

    def rec(k, rows, forb):
        nonlocal count
        while k < len(undecided):
            i, j = undecided[k]
            if (rows[i] >> j & 1) or (forb[i] >> j & 1):
                k += 1
                continue
            break
        else:
            count += 1
            if limit is not None and count > limit:
                raise BudgetExceeded(f"enumeration exceeded {limit} elements", estimate=count)
            if emit is not None:
                emit(tuple(rows))
            return
        i, j = undecided[k]
        # branch 1: include (i, j)
        up_j = rows[j]
        new = rows[:]
        ok = True
        bit_i = 1 << i
        for a in range(n):
            if rows[a] & bit_i:
                na = rows[a] | up_j
                if na & forb[a]:
                    ok = False
                    break
                new[a] = na
        if ok:
            rec(k + 1, new, forb)
        # branch 2: exclude (i, j)
        f2 = forb[:]
        f2[i] |= 1 << j
        rec(k + 1, rows, f2)

    rec(0, rows0, forb0)
    return count


@dataclass
class LatticeSnapshot:
    """Deduplicated closed relations with per-element provenance.

    ``provenance[k]`` is ``("generator", g)``, ``("const", name)``, ``("enumerated",)``, or
    ``(op, i, j)`` with ``op`` in ``{"meet", "join"}`` and parents ``i, j < k``.
    """

    n: int
    elements: list[QuasiRel]
    provenance: list[tuple]
    index: dict[QuasiRel, int] = field(default_factory=dict)
    depth: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.index:
            self.index = {r: k for k, r in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, rel: QuasiRel) -> bool:
        return rel in self.index

    @property
    def count(self) -> int:
        return len(self.elements)


def _check_enum_bound(n: int, bound: int | None):
    if bound is not None and n > bound:
        raise BudgetExceeded(
            f"refusing to enumerate Quo({n}): n exceeds the configured bound {bound} "
            f"(estimated {QUO_SIZES.get(n, 'more than 8e12')} elements)",
            estimate=QUO_SIZES.get(n),
        )


def enumerate_quo(n: int, bound: int | None = 6, count_only: bool = False):
    """All quasiorders of an ``n``-element set (or only their number)."""
    _check_enum_bound(n, bound)
    return _enumerate(QuasiRel.identity(n), None, count_only)


def enumerate_quleq(p: Poset, max_elements: int | None = 10**7, count_only: bool = False):
    """All quasiorders extending the order of ``p`` (or only their number)."""
    # no cheap a-priori size bound: the DFS refuses once it passes the cap
    return _enumerate(p.order, max_elements, count_only)


def count_quleq(p: Poset, max_elements: int | None = 10**7) -> int:
    return enumerate_quleq(p, max_elements, count_only=True)


def _enumerate(base: QuasiRel, limit, count_only):
    n = base.n
    if count_only:
        return _dfs_quasiorders(base, limit, None)
    out: list[tuple[int, ...]] = []
    _dfs_quasiorders(base, limit, out.append)
    out.sort()
    elements = [QuasiRel(n, rows) for rows in out]
    return LatticeSnapshot(n, elements, [("enumerated",)] * len(elements), depth=[0] * len(elements))


# -- closure with witnesses ----------------------------------------------------------


@dataclass
class ClosureResult:
    snapshot: LatticeSnapshot
    found: dict[int, int]  # target position -> element index
    missing: list[int]  # target positions not reached
    complete: bool  # fixpoint reached (closure is the whole generated sublattice)
    budget_hit: str | None = None

    def term(self, element: int, generator_terms: Sequence[LatTerm] | None = None, const_terms=None, memo=None) -> LatTerm:
        return witness_term(self.snapshot, element, generator_terms, const_terms, memo)

    def target_term(self, target: int, generator_terms=None, const_terms=None, memo=None) -> LatTerm:
        return self.term(self.found[target], generator_terms, const_terms, memo)


def witness_term(snap: LatticeSnapshot, element: int, generator_terms=None, const_terms=None, memo=None) -> LatTerm:
    """Rebuild a term for ``snap.elements[element]`` from provenance.

    Generators become ``Var(g)`` and constants ``Const(name)`` unless ``generator_terms`` /
    ``const_terms`` supply replacements.  Passing one ``memo`` dict across calls makes
    shared subterms shared objects.
    """
    memo = {} if memo is None else memo
    stack = [element]
    while stack:
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        prov = snap.provenance[k]
        kind = prov[0]
        if kind == "generator":
            g = prov[1]
            memo[k] = generator_terms[g] if generator_terms is not None else Var(g)
            stack.pop()
        elif kind == "const":
            memo[k] = const_terms[prov[1]] if const_terms and prov[1] in const_terms else Const(prov[1])
            stack.pop()
        elif kind in ("meet", "join"):
            i, j = prov[1], prov[2]
            pending = [c for c in (i, j) if c not in memo]
            if pending:
                stack.extend(pending)
                continue
            memo[k] = (meet_of if kind == "meet" else join_of)(memo[i], memo[j])
            stack.pop()
        else:
            raise BadInput(f"element {k} has no constructive provenance ({kind})")
    return memo[element]


class _Store:
    """Append-only element store with a vectorised open-addressing hash index.

    When ``n*n <= 64`` an element is its packed ``uint64`` word (which is also its key);
    otherwise it is a row stack entry with a separate 64-bit hash key.
    """

    _MULT = np.uint64(0x9E3779B97F4A7C15)

    def __init__(self, n: int):
        self.n = n
        self.exact = batch.exact_keys(n)
        shape = (1024,) if self.exact else (1024, n)
        self._data = np.zeros(shape, dtype=np.uint64)
        self._keys = np.zeros(1024, dtype=np.uint64)
        self.size = 0
        self._alloc(1 << 12)

    @property
    def data(self) -> np.ndarray:
        return self._data[: self.size]

    def __len__(self):
        return self.size

    # element-level operations in the store's representation
    def from_rels(self, rels) -> np.ndarray:
        arr = batch.stack(rels) if rels else np.zeros((0, self.n), dtype=np.uint64)
        return batch.pack(arr) if self.exact else arr

    def keys_of(self, data: np.ndarray) -> np.ndarray:
        return data if self.exact else batch.keys(data)

    def join(self, u: np.ndarray) -> np.ndarray:
        return batch.close_packed(u, self.n) if self.exact else batch.close(u)

    def same(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return x == y if self.exact else (x == y).all(axis=1)

    def first_unique(self, data: np.ndarray) -> np.ndarray:
        """Sorted indices of the first occurrence of each distinct element."""
        _, first = np.unique(data, axis=None if self.exact else 0, return_index=True)
        first.sort()
        return first

    def to_rels(self) -> list[QuasiRel]:
        rows = batch.unpack(self.data, self.n) if self.exact else self.data
        return batch.unstack(rows)

    # hash index
    def _alloc(self, cap: int):
        self.cap = cap
        self.shift = np.uint64(64 - (cap.bit_length() - 1))
        self.t_keys = np.zeros(cap, dtype=np.uint64)
        self.t_pos = np.full(cap, -1, dtype=np.int64)

    def _slot(self, keys: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return ((keys * self._MULT) >> self.shift).astype(np.int64)

    def _insert(self, keys: np.ndarray, pos: np.ndarray):
        slots = self._slot(keys)
        mask = self.cap - 1
        while len(keys):
            free = self.t_pos[slots] < 0
            # one winner per free slot; losers and blocked entries probe on
            cand = np.nonzero(free)[0]
            _, win = np.unique(slots[cand], return_index=True)
            win = cand[win]
            self.t_keys[slots[win]] = keys[win]
            self.t_pos[slots[win]] = pos[win]
            left = np.ones(len(keys), dtype=bool)
            left[win] = False
            keys, pos, slots = keys[left], pos[left], (slots[left] + 1) & mask

    def append(self, data: np.ndarray, keys: np.ndarray):
        need = self.size + len(data)
        if need > len(self._data):
            cap = max(need, 2 * len(self._data))
            grown = np.zeros((cap,) + self._data.shape[1:], dtype=np.uint64)
            grown[: self.size] = self._data[: self.size]
            self._data = grown
            gk = np.zeros(cap, dtype=np.uint64)
            gk[: self.size] = self._keys[: self.size]
            self._keys = gk
        self._data[self.size : need] = data
        self._keys[self.size : need] = keys
        start = self.size
        self.size = need
        if 2 * need > self.cap:
            cap = self.cap
            while 2 * need > cap:
                cap *= 2
            self._alloc(cap)
            self._insert(self._keys[:need].copy(), np.arange(need, dtype=np.int64))
        else:
            self._insert(np.asarray(keys, dtype=np.uint64), np.arange(start, need, dtype=np.int64))

    def lookup(self, data: np.ndarray, keys: np.ndarray) -> np.ndarray:
        """Index of each candidate in the store, or -1.  Hash hits are confirmed in full."""
        out = np.full(len(keys), -1, dtype=np.int64)
        active = np.arange(len(keys))
        slots = self._slot(keys)
        mask = self.cap - 1
        while len(active):
            pos = self.t_pos[slots]
            hit = (pos >= 0) & (self.t_keys[slots] == keys[active])
            if not self.exact and hit.any():
                h = np.nonzero(hit)[0]
                ok = self.same(self._data[pos[h]], data[active[h]])
                hit[h[~ok]] = False
            out[active[hit]] = pos[hit]
            go_on = (pos >= 0) & ~hit
            active, slots = active[go_on], (slots[go_on] + 1) & mask
        return out


def close_with_witnesses(
    generators: Sequence[QuasiRel],
    targets: Sequence[QuasiRel] = (),
    max_elements: int | None = 2_000_000,
    max_seconds: float | None = None,
    constants: dict[str, QuasiRel] | None = None,
    stop_when_found: bool = True,
    chunk: int = 1 << 18,
) -> ClosureResult:
    """Breadth-first closure of ``generators`` under binary meet and join.

    Round ``d`` combines every element first found in round ``d-1`` with every element
    known so far.  Candidates are examined in a fixed order (pair index, meet before
    join), so the element set, its order and each element's provenance are deterministic.
    ``constants`` are extra named elements (e.g. the lattice bounds for closure as a
    complete lattice); they appear as ``Const`` leaves in witness terms.
    """
    generators = list(generators)
    if not generators and not constants:
        raise BadInput("nothing to close")
    n = (generators or list(constants.values()))[0].n
    batch.check_dim(n)
    for g in generators:
        if g.n != n or not g.closed:
            raise BadInput("generators must be closed relations of one dimension")
    start = time.monotonic()
    store = _Store(n)
    provenance: list[tuple] = []
    depth: list[int] = []

    seeds = [(g, ("generator", i)) for i, g in enumerate(generators)]
    for name, rel in (constants or {}).items():
        seeds.append((rel, ("const", name)))
    for rel, prov in seeds:
        d = store.from_rels([rel])
        k = store.keys_of(d)
        if store.lookup(d, k)[0] < 0:
            store.append(d, k)
            provenance.append(prov)
            depth.append(0)

    target_data = store.from_rels(list(targets))
    target_keys = store.keys_of(target_data)
    found: dict[int, int] = {}

    def refresh_found():
        if not len(target_keys):
            return
        pos = store.lookup(target_data, target_keys)
        for t, p in enumerate(pos):
            if p >= 0 and t not in found:
                found[t] = int(p)

    refresh_found()
    frontier_lo, frontier_hi = 0, len(store)
    budget_hit = None
    round_done = False
    rnd = 0
    while frontier_lo < frontier_hi:
        if stop_when_found and targets and len(found) == len(targets):
            break
        rnd += 1
        new_prov: list[tuple] = []
        pending: list[np.ndarray] = []
        pending_keys: list[int] = []
        seen_new: dict[int, list[int]] = {}  # key -> pending slots found this round
        missing_keys = {int(target_keys[t]) for t in range(len(target_keys)) if t not in found}
        # pairs (i, j) with i in the frontier and j <= i cover every pair touching it
        i0 = frontier_lo
        while i0 < frontier_hi:
            i1, npairs = i0, 0
            while i1 < frontier_hi and (npairs == 0 or npairs + i1 + 1 <= chunk):
                npairs += i1 + 1
                i1 += 1
            ii = np.repeat(np.arange(i0, i1, dtype=np.int64), np.arange(i0 + 1, i1 + 1))
            jj = np.concatenate([np.arange(0, i + 1, dtype=np.int64) for i in range(i0, i1)])
            i0 = i1
            a = store.data[ii]
            b = store.data[jj]
            u = a | b
            # comparable pairs give nothing new
            keep = ~(store.same(u, a) | store.same(u, b))
            ii, jj, a, b, u = ii[keep], jj[keep], a[keep], b[keep], u[keep]
            for op in ("meet", "join"):
                res = a & b if op == "meet" else store.join(u)
                k = store.keys_of(res)
                fresh = np.nonzero(store.lookup(res, k) < 0)[0]
                if not len(fresh):
                    continue
                idx = fresh[store.first_unique(res[fresh])]
                for f in idx:
                    key = int(k[f])
                    elem = res[f]
                    slots = seen_new.get(key)
                    if slots is not None:
                        if store.exact or any(bool(np.all(pending[s] == elem)) for s in slots):
                            continue
                    seen_new.setdefault(key, []).append(len(pending))
                    pending.append(elem.copy() if not store.exact else elem)
                    pending_keys.append(key)
                    new_prov.append((op, int(ii[f]), int(jj[f])))
                    missing_keys.discard(key)
            if stop_when_found and targets and not missing_keys:
                round_done = True
                break
            if max_seconds is not None and time.monotonic() - start > max_seconds:
                budget_hit = "seconds"
                break
            if max_elements is not None and len(store) + len(pending) > max_elements:
                budget_hit = "elements"
                break
        if pending:
            store.append(np.stack(pending), np.array(pending_keys, dtype=np.uint64))
            provenance.extend(new_prov)
            depth.extend([rnd] * len(new_prov))
        refresh_found()
        frontier_lo, frontier_hi = frontier_hi, len(store)
        if budget_hit or round_done:
            break
    complete = frontier_lo >= frontier_hi and budget_hit is None and not round_done
    elements = store.to_rels()
    snap = LatticeSnapshot(n, elements, provenance, depth=depth)
    missing = [t for t in range(len(targets)) if t not in found]
    return ClosureResult(snap, found, missing, complete, budget_hit)


# -- small lattices by operation tables ------------------------------------------------


class FiniteLattice:
    """A finite lattice given by its element list and meet/join index tables."""

    def __init__(self, elements: Sequence, meet_table: np.ndarray, join_table: np.ndarray, names=None):
        self.elements = list(elements)
        self.meet_table = np.asarray(meet_table, dtype=np.int32)
        self.join_table = np.asarray(join_table, dtype=np.int32)
        self.names = list(names) if names is not None else [str(i) for i in range(len(self.elements))]
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        leq = self.meet_table == np.arange(n)[:, None]
        self.leq_table = leq
        bottoms = [i for i in range(n) if leq[i].all()]
        tops = [i for i in range(n) if leq[:, i].all()]
        if len(bottoms) != 1 or len(tops) != 1:
            raise BadInput("tables do not describe a bounded lattice")
        self.bottom, self.top = bottoms[0], tops[0]

    def __len__(self):
        return len(self.elements)

    def meet(self, a: int, b: int) -> int:
        return int(self.meet_table[a, b])

    def join(self, a: int, b: int) -> int:
        return int(self.join_table[a, b])

    def leq(self, a: int, b: int) -> bool:
        return bool(self.leq_table[a, b])

    def covers(self, a: int, b: int) -> bool:
        """True iff ``a`` is covered by ``b``."""
        if a == b or not self.leq(a, b):
            return False
        between = self.leq_table[a] & self.leq_table[:, b]
        return int(between.sum()) == 2

    @classmethod
    def from_relations(cls, rels: Sequence[QuasiRel]) -> "FiniteLattice":
        rels = list(rels)
        m = len(rels)
        arr = batch.stack(rels)
        n = arr.shape[1]
        keymap = {}
        k = batch.keys(arr)
        if not batch.exact_keys(n):
            keymap = {r: i for i, r in enumerate(rels)}
        lut = {int(v): i for i, v in enumerate(k)}
        meet_t = np.zeros((m, m), dtype=np.int32)
        join_t = np.zeros((m, m), dtype=np.int32)
        for i in range(m):
            a = np.broadcast_to(arr[i], (m, n))
            for table, res in ((meet_t, a & arr), (join_t, batch.close(a | arr))):
                if keymap:
                    table[i] = [keymap[QuasiRel(n, (int(v) for v in row))] for row in res]
                else:
                    table[i] = [lut[int(v)] for v in batch.keys(res)]
        return cls(rels, meet_t, join_t)

    def closure_mask(self, gens: Iterable[int], bounds: bool = True) -> np.ndarray:
        """Boolean mask of the sublattice generated by ``gens`` (plus the bounds)."""
        mask = np.zeros(len(self.elements), dtype=bool)
        mask[list(gens)] = True
        if bounds:
            mask[[self.bottom, self.top]] = True
        while True:
            idx = np.nonzero(mask)[0]
            sub = np.ix_(idx, idx)
            new = mask.copy()
            new[self.meet_table[sub].ravel()] = True
            new[self.join_table[sub].ravel()] = True
            if new.sum() == mask.sum():
                return mask
            mask = new

    def generates(self, gens: Iterable[int], bounds: bool = True) -> bool:
        return bool(self.closure_mask(gens, bounds).all())
