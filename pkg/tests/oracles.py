"""Independent reference implementations used as test oracles.

Nothing here imports the package's closure or enumeration code; relations are plain sets
of pairs so that mistakes in the bit-level code cannot cancel out.
"""

from itertools import combinations
from math import comb

import numpy as np

# number of quasiorders on an n-element set (A000798)
QUO_COUNTS = {1: 1, 2: 4, 3: 29, 4: 355, 5: 6942, 6: 209527, 7: 9535241}


def closure(n, pairs):
    rel = {(i, i) for i in range(n)} | set(pairs)
    for k in range(n):
        rel |= {(i, j) for (i, kk) in rel if kk == k for (k2, j) in rel if k2 == k}
    return frozenset(rel)


def as_set(q):
    return frozenset(q.pairs())


def order_pairs(n, covers):
    return closure(n, covers)


def qum(n, covers, x, y):
    """Least quasiorder containing the order and (x, y), by closure."""
    return closure(n, set(order_pairs(n, covers)) | {(x, y)})


def count_quasiorders(n):
    """Brute force over all off-diagonal relations, vectorised over bitmasks."""
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not off:
        return 1
    idx = {p: b for b, p in enumerate(off)}
    masks = np.arange(1 << len(off), dtype=np.int64)
    bit = {p: ((masks >> b) & 1).astype(bool) for p, b in idx.items()}
    ok = np.ones(len(masks), dtype=bool)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) == 3:
                    ok &= ~(bit[(i, j)] & bit[(j, k)]) | bit[(i, k)]
    return int(ok.sum())


def lasp(n):
    """Smallest positive k with n <= C(k, floor(k/2)) (0 for n = 0), by direct search."""
    if n == 0:
        return 0
    k = 1
    while comb(k, k // 2) < n:
        k += 1
    return k


def is_antichain_family(sets):
    return all(not (a <= b or b <= a) for a, b in combinations(sets, 2))
