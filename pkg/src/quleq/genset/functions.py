"""Counting functions and the Boolean (Sperner) generating family."""

from __future__ import annotations

from itertools import combinations
from math import comb

from ..errors import BadInput

__all__ = ["lasp", "f_card", "boolean_generators", "sperner_assignment", "singleton_recovered"]


def _as_int(n) -> int:
    if isinstance(n, str):
        text = n.strip().replace("_", "")
        if not text.isdigit():
            raise BadInput(f"not a non-negative decimal integer: {n!r}")
        return int(text)
    if isinstance(n, bool) or not isinstance(n, int):
        raise BadInput(f"expected an integer, got {type(n).__name__}")
    return n


def lasp(n) -> int:
    """Smallest ``k`` with ``n <= C(k, floor(k/2))``; ``lasp(0) == 0``.

    ``n`` may be a Python int of any size or a decimal string such as ``"1" + "0"*100``.
    """
    n = _as_int(n)
    if n < 0:
        raise BadInput("lasp is defined for n >= 0")
    if n == 0:
        return 0
    k = 1
    # central binomials grow like 2^k / sqrt(k), so this loop is O(log n) steps
    while comb(k, k // 2) < n:
        k += 1
    return k


def f_card(n: int) -> int:
    """Size of the smallest known generating set of Quo(n): 0, 2, 4, 5, then 4."""
    n = _as_int(n)
    if n < 1:
        raise BadInput("f is defined for n >= 1")
    return {1: 0, 2: 2, 3: 4, 4: 5}.get(n, 4)


def sperner_assignment(m: int) -> tuple[int, list[frozenset[int]]]:
    """Injective map ``i -> B_i`` from ``range(m)`` into the ``floor(k/2)``-subsets of
    ``range(k)``, ``k = lasp(m)``, taking subsets in colexicographic order.

    For ``m == 1`` the only half-size subset of a 1-set is empty, which would not let the
    single point be recovered, so ``B_0 = {0}`` is used instead.
    """
    if m < 1:
        raise BadInput("need m >= 1")
    k = lasp(m)
    if m == 1:
        return 1, [frozenset({0})]
    subsets = sorted(combinations(range(k), k // 2), key=lambda c: tuple(reversed(c)))
    return k, [frozenset(c) for c in subsets[:m]]


def boolean_generators(m: int) -> list[frozenset[int]]:
    """The family ``X_j = {i : j in B_i}``, ``j < lasp(m)``, of subsets of ``range(m)``.

    Because the ``B_i`` form an antichain, intersecting all members that contain ``i``
    leaves exactly ``{i}``; so together with the bounds the family generates the whole
    powerset of ``range(m)``.
    """
    k, blocks = sperner_assignment(m)
    return [frozenset(i for i, b in enumerate(blocks) if j in b) for j in range(k)]


def singleton_recovered(m: int, family: list[frozenset[int]] | None = None) -> bool:
    """Check that every ``{i}`` is the intersection of the members containing ``i``."""
    family = boolean_generators(m) if family is None else family
    masks = [sum(1 << i for i in x) for x in family]
    contains: list[list[int]] = [[] for _ in range(m)]
    for j, x in enumerate(family):
        for i in x:
            contains[i].append(j)
    full = (1 << m) - 1
    for i in range(m):
        acc = full
        for j in contains[i]:
            acc &= masks[j]
        if acc != 1 << i:
            return False
    return True
