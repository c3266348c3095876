"""Hypothesis strategies for relations, posets and terms."""

from hypothesis import strategies as st

from quleq.poset import Poset
from quleq.relation import QuasiRel


@st.composite
def relations(draw, n=None, max_n=8):
    n = draw(st.integers(1, max_n)) if n is None else n
    rows = [draw(st.integers(0, (1 << n) - 1)) for _ in range(n)]
    return QuasiRel(n, rows)


@st.composite
def quasiorders(draw, n=None, max_n=8):
    r = draw(relations(n=n, max_n=max_n))
    return r.closure()


@st.composite
def posets(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=2 * n, unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    return Poset(n, [(perm[i], perm[j]) for i, j in chosen])


@st.composite
def forests(draw, max_n=12):
    """Each element gets at most one lower cover (a random parent), then a random
    orientation flip per tree keeps both up- and down-branching shapes."""
    n = draw(st.integers(1, max_n))
    covers = []
    for v in range(1, n):
        parent = draw(st.integers(-1, v - 1))
        if parent >= 0:
            covers.append((parent, v))
    if draw(st.booleans()):
        covers = [(y, x) for x, y in covers]
    return Poset(n, covers)
