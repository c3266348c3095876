"""Binary relations on {0..n-1} stored as bit rows.

Bit ``j`` of ``rows[i]`` is set iff the pair ``(i, j)`` belongs to the relation.
All values are immutable; every operation returns a fresh relation.
"""

from __future__ import annotations

import base64
import struct
from typing import Iterable, Iterator, Sequence

from .errors import BadInput

__all__ = [
    "QuasiRel",
    "close_rows",
    "tr_close",
    "meet",
    "join",
    "big_join",
    "big_meet",
]


def close_rows(rows: Sequence[int]) -> tuple[int, ...]:
    """Reflexive-transitive closure of a row-encoded relation (Warshall on bit rows)."""
    rows = list(rows)
    n = len(rows)
    for i in range(n):
        rows[i] |= 1 << i
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return tuple(rows)


class QuasiRel:
    """An ``n x n`` boolean relation, usually a quasiorder (reflexive and transitive)."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, rows: Iterable[int]):
        rows = tuple(rows)
        if len(rows) != n:
            raise BadInput(f"expected {n} rows, got {len(rows)}")
        mask = (1 << n) - 1
        if any(r & ~mask for r in rows):
            raise BadInput("row has bits outside the carrier")
        self.n = n
        self.rows = rows
        self._hash = hash((n, rows))

    # construction -----------------------------------------------------
    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "QuasiRel":
        rows = [0] * n
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise BadInput(f"pair ({x}, {y}) outside [0, {n})")
            rows[x] |= 1 << y
        return cls(n, rows)

    @classmethod
    def identity(cls, n: int) -> "QuasiRel":
        return cls(n, (1 << i for i in range(n)))

    @classmethod
    def full(cls, n: int) -> "QuasiRel":
        mask = (1 << n) - 1
        return cls(n, (mask for _ in range(n)))

    @classmethod
    def from_matrix(cls, matrix) -> "QuasiRel":
        n = len(matrix)
        return cls.from_pairs(n, ((i, j) for i in range(n) for j in range(n) if matrix[i][j]))

    # inspection ---------------------------------------------------------
    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.rows[x] >> y & 1)

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    yield (i, j)
                r >>= 1
                j += 1

    def __len__(self) -> int:
        return sum(bin(r).count("1") for r in self.rows)

    def column(self, j: int) -> int:
        """Bitmask of all ``x`` with ``(x, j)`` in the relation."""
        col = 0
        for i, r in enumerate(self.rows):
            if r >> j & 1:
                col |= 1 << i
        return col

    def to_matrix(self) -> list[list[bool]]:
        return [[bool(r >> j & 1) for j in range(self.n)] for r in self.rows]

    def inverse(self) -> "QuasiRel":
        return QuasiRel.from_pairs(self.n, ((y, x) for x, y in self.pairs()))

    def is_reflexive(self) -> bool:
        return all(r >> i & 1 for i, r in enumerate(self.rows))

    def is_transitive(self) -> bool:
        for r in self.rows:
            acc = r
            j, rr = 0, r
            while rr:
                if rr & 1:
                    acc |= self.rows[j]
                rr >>= 1
                j += 1
            if acc != r:
                return False
        return True

    @property
    def closed(self) -> bool:
        return self.is_reflexive() and self.is_transitive()

    def is_antisymmetric(self) -> bool:
        return all(not (x != y and (y, x) in self) for x, y in self.pairs())

    def issubset(self, other: "QuasiRel") -> bool:
        _same_dim(self, other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    __le__ = issubset

    def __lt__(self, other: "QuasiRel") -> bool:
        return self.issubset(other) and self != other

    # algebra ------------------------------------------------------------
    def __and__(self, other: "QuasiRel") -> "QuasiRel":
        _same_dim(self, other)
        return QuasiRel(self.n, (a & b for a, b in zip(self.rows, other.rows)))

    def __or__(self, other: "QuasiRel") -> "QuasiRel":
        """Plain set union; not closed in general."""
        _same_dim(self, other)
        return QuasiRel(self.n, (a | b for a, b in zip(self.rows, other.rows)))

    def closure(self) -> "QuasiRel":
        return QuasiRel(self.n, close_rows(self.rows))

    # equality / hashing -------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiRel):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self) -> tuple:
        return (self.n, self.rows)

    def __repr__(self) -> str:
        return f"QuasiRel(n={self.n}, pairs={sorted(p for p in self.pairs() if p[0] != p[1])})"

    # encoding -----------------------------------------------------------
    def to_bytes(self) -> bytes:
        """Row-major bits, most significant bit first in each byte, ceil(n^2/8) bytes."""
        n = self.n
        value = 0
        for r in self.rows:
            for j in range(n):
                value = (value << 1) | (r >> j & 1)
        nbits = n * n
        nbytes = (nbits + 7) // 8
        value <<= nbytes * 8 - nbits
        return value.to_bytes(nbytes, "big")

    @classmethod
    def from_bytes(cls, n: int, data: bytes) -> "QuasiRel":
        nbits = n * n
        nbytes = (nbits + 7) // 8
        if len(data) != nbytes:
            raise BadInput(f"relation body must be {nbytes} bytes for n={n}, got {len(data)}")
        value = int.from_bytes(data, "big")
        pad = nbytes * 8 - nbits
        if value & ((1 << pad) - 1):
            raise BadInput("nonzero padding bits in relation encoding")
        value >>= pad
        rows = []
        for i in range(n):
            chunk = (value >> (n * (n - 1 - i))) & ((1 << n) - 1)
            row = 0
            for j in range(n):
                if chunk >> (n - 1 - j) & 1:
                    row |= 1 << j
            rows.append(row)
        return cls(n, rows)

    def encode(self) -> bytes:
        """Header (big-endian uint16 ``n``) followed by :meth:`to_bytes`."""
        return struct.pack(">H", self.n) + self.to_bytes()

    @classmethod
    def decode(cls, blob: bytes) -> "QuasiRel":
        if len(blob) < 2:
            raise BadInput("relation blob shorter than its header")
        (n,) = struct.unpack(">H", blob[:2])
        return cls.from_bytes(n, blob[2:])

    def to_b64(self) -> str:
        return base64.b64encode(self.encode()).decode("ascii")

    @classmethod
    def from_b64(cls, text: str) -> "QuasiRel":
        try:
            blob = base64.b64decode(text, validate=True)
        except ValueError as exc:
            raise BadInput(f"invalid base64 relation: {exc}") from None
        return cls.decode(blob)


def _same_dim(a: QuasiRel, b: QuasiRel) -> None:
    if a.n != b.n:
        raise BadInput(f"dimension mismatch: {a.n} vs {b.n}")


def tr_close(r: QuasiRel) -> QuasiRel:
    return r.closure()


def meet(a: QuasiRel, b: QuasiRel) -> QuasiRel:
    return a & b


def join(a: QuasiRel, b: QuasiRel) -> QuasiRel:
    _same_dim(a, b)
    return QuasiRel(a.n, close_rows([x | y for x, y in zip(a.rows, b.rows)]))


def big_join(rels: Iterable[QuasiRel], n: int | None = None) -> QuasiRel:
    rels = list(rels)
    if not rels:
        if n is None:
            raise BadInput("empty join needs an explicit dimension")
        return QuasiRel.identity(n)
    rows = list(rels[0].rows)
    for r in rels[1:]:
        _same_dim(rels[0], r)
        rows = [x | y for x, y in zip(rows, r.rows)]
    return QuasiRel(rels[0].n, close_rows(rows))


def big_meet(rels: Iterable[QuasiRel], n: int | None = None) -> QuasiRel:
    rels = list(rels)
    if not rels:
        if n is None:
            raise BadInput("empty meet needs an explicit dimension")
        return QuasiRel.full(n)
    out = rels[0]
    for r in rels[1:]:
        out = out & r
    return out
