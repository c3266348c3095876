"""Vectorised relation arithmetic on stacks of relations.

A stack is a ``(m, n)`` ``uint64`` array; entry ``[k, i]`` is row ``i`` of relation ``k``
(bit ``j`` set iff ``(i, j)`` is in the relation).  Requires ``n <= 64``.
"""

from __future__ import annotations

import numpy as np

from .errors import BadInput
from .relation import QuasiRel

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def check_dim(n: int) -> None:
    if n > 64:
        raise BadInput("vectorised relation engine supports n <= 64")


def stack(rels) -> np.ndarray:
    rels = list(rels)
    if not rels:
        return np.zeros((0, 0), dtype=np.uint64)
    n = rels[0].n
    check_dim(n)
    return np.array([r.rows for r in rels], dtype=np.uint64).reshape(len(rels), n)


def unstack(arr: np.ndarray) -> list[QuasiRel]:
    n = arr.shape[1]
    return [QuasiRel(n, (int(v) for v in row)) for row in arr]


def close(arr: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of every relation in the stack (in place and returned)."""
    m, n = arr.shape
    one = np.uint64(1)
    zero = np.uint64(0)
    diag = np.array([1 << i for i in range(n)], dtype=np.uint64)
    arr |= diag
    hit = np.empty_like(arr)
    for k in range(n):
        # rows containing bit k absorb row k; (0 - bit) is an all-ones mask when bit is set
        np.right_shift(arr, np.uint64(k), out=hit)
        hit &= one
        np.subtract(zero, hit, out=hit)
        hit &= arr[:, k : k + 1]
        arr |= hit
    return arr


def meets(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a & b


def joins(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return close(a | b)


def keys(arr: np.ndarray) -> np.ndarray:
    """One ``uint64`` per relation.  Exact (bit packing) when ``n*n <= 64``, otherwise a
    mixing hash that callers must confirm on collision."""
    m, n = arr.shape
    if n * n <= 64:
        out = np.zeros(m, dtype=np.uint64)
        for i in range(n):
            out |= arr[:, i] << np.uint64(n * i)
        return out
    h = np.full(m, np.uint64(n), dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i in range(n):
            h ^= arr[:, i] + _GOLDEN + (h << np.uint64(6)) + (h >> np.uint64(2))
            h ^= h >> np.uint64(30)
            h *= _MIX1
            h ^= h >> np.uint64(27)
            h *= _MIX2
            h ^= h >> np.uint64(31)
    return h


def exact_keys(n: int) -> bool:
    return n * n <= 64


# -- packed form: one uint64 per relation, row i in bits [n*i, n*i + n) -------------------


def pack(arr: np.ndarray) -> np.ndarray:
    if not exact_keys(arr.shape[1]):
        raise BadInput("packed form needs n*n <= 64")
    return keys(arr)


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    mask = np.uint64((1 << n) - 1)
    out = np.empty((len(words), n), dtype=np.uint64)
    for i in range(n):
        out[:, i] = (words >> np.uint64(n * i)) & mask
    return out


def _column_masks(n: int) -> list[np.uint64]:
    return [np.uint64(sum(1 << (n * i + k) for i in range(n))) for k in range(n)]


def close_packed(words: np.ndarray, n: int) -> np.ndarray:
    """Reflexive-transitive closure of packed relations (in place and returned).

    For pivot ``k`` the column bits ``(i, k)`` are shifted down to bit ``n*i`` and then
    multiplied by row ``k``; rows are ``n`` bits apart and row ``k`` is below ``2**n``,
    so the product places a copy of row ``k`` in every row that contains ``(i, k)``
    without carries.
    """
    cols = _column_masks(n)
    rmask = np.uint64((1 << n) - 1)
    words |= np.uint64(sum(1 << (n * i + i) for i in range(n)))
    tmp = np.empty_like(words)
    row = np.empty_like(words)
    with np.errstate(over="ignore"):
        for k in range(n):
            np.right_shift(words, np.uint64(n * k), out=row)
            row &= rmask
            np.bitwise_and(words, cols[k], out=tmp)
            tmp >>= np.uint64(k)
            tmp *= row
            words |= tmp
    return words
