import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import as_set, order_pairs
from quleq.errors import BadInput, CycleError
from quleq.poset import Poset, antichain, cardinal_sum, chain, compute_params, figure1, figure2, quotient_by_theta, y_poset
from quleq.quolattice import _enumerate, count_quleq, enumerate_quleq
from quleq.relation import QuasiRel
from strategies import posets, quasiorders


def test_cycle_rejected():
    with pytest.raises(CycleError):
        Poset(3, [(0, 1), (1, 2), (2, 0)])


def test_out_of_range():
    with pytest.raises(BadInput):
        Poset(2, [(0, 2)])


def test_reduction_drops_implied_pairs():
    p = Poset(3, [(0, 1), (1, 2), (0, 2)])
    assert p.covers == ((0, 1), (1, 2))
    assert p.is_chain and p.length == 2


def test_y_poset_shape():
    y = y_poset()
    (c,) = y.components
    assert c.extremals == (0, 2, 3)
    assert len(c.edges) == 3 and not y.is_chain and y.is_forest


def test_figure1_caption():
    pr = compute_params(figure1())
    assert (pr.ncmp, pr.ncs, pr.ncedge, pr.ncextr, pr.ntp1, pr.ntp2, pr.ncorr) == (7, 6, 5, 4, 1, 1, 2)


def test_figure2_caption():
    pr = compute_params(figure2())
    assert (pr.ncmp, pr.ncs, pr.ncedge, pr.ncextr, pr.ntp1, pr.ntp2, pr.ncorr) == (14, 5, 4, 2, 0, 0, 0)


def test_selector_tie_break_prefers_smaller_components():
    # ntp 1 for every chain; chain(1) has the fewest elements
    p = cardinal_sum([chain(3), chain(1), chain(2), chain(1)])
    pr = compute_params(p)
    assert pr.selectors == (1, 3)


def test_params_need_three_components_for_selectors():
    pr = compute_params(cardinal_sum([chain(1), chain(2)]))
    assert pr.selectors is None and pr.ncorr is None


def test_dict_roundtrip():
    p = figure1()
    assert Poset.loads(p.dumps()) == p


@given(posets())
def test_covers_roundtrip(p):
    q = Poset(p.n, p.covers)
    assert q.covers == p.covers
    assert as_set(p.order) == order_pairs(p.n, p.covers)


@given(posets(max_n=5), posets(max_n=5))
def test_cardinal_sum_params(a, b):
    s = cardinal_sum([a, b])
    assert len(s.components) == len(a.components) + len(b.components)
    pa, pb, ps = (compute_params(x) for x in (a, b, s))
    assert ps.ncs == max(pa.ncs, pb.ncs)
    assert ps.ncedge == max(pa.ncedge, pb.ncedge)
    assert ps.ncextr == max(pa.ncextr, pb.ncextr)


def _image(rho, block, m):
    rows = [0] * m
    for x, y in rho.pairs():
        rows[block[x]] |= 1 << block[y]
    return QuasiRel(m, rows)


@given(quasiorders(max_n=5))
def test_filter_isomorphic_to_quotient_filter(mu):
    q, block = quotient_by_theta(mu)
    for x in range(mu.n):
        for y in range(mu.n):
            assert ((x, y) in mu) == q.leq(block[x], block[y])
    upper = _enumerate(mu, None, False).elements
    lower = set(enumerate_quleq(q).elements)
    images = [_image(r, block, q.n) for r in upper]
    assert len(set(images)) == len(upper) == len(lower)
    assert set(images) == lower
    # order is preserved and reflected on a sample of pairs
    for a, ia in list(zip(upper, images))[:20]:
        for b, ib in list(zip(upper, images))[-20:]:
            assert a.issubset(b) == ia.issubset(ib)


@given(st.integers(1, 7))
def test_antichain_and_chain_counts(n):
    assert len(antichain(n).components) == n
    assert count_quleq(chain(n - 1)) == 2 ** (n - 1)
