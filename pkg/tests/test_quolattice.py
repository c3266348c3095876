import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import QUO_COUNTS, as_set, count_quasiorders, qum
from quleq import batch
from quleq.errors import BadInput, BudgetExceeded
from quleq.latterm import evaluate
from quleq.poset import Poset, antichain, cardinal_sum, chain, figure1, y_poset
from quleq.quolattice import (
    QUO_OPS,
    FiniteLattice,
    close_with_witnesses,
    count_quleq,
    enumerate_quleq,
    enumerate_quo,
    nabla_plus,
    phi_embed,
    quo_pair,
    qum_pair,
)
from quleq.relation import QuasiRel, join
from strategies import quasiorders

BUILT_IN = [antichain(5), chain(4), y_poset(), cardinal_sum([y_poset(), chain(2), antichain(2)]), cardinal_sum([chain(1)] * 3)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_brute_force(n):
    assert enumerate_quo(n, count_only=True) == count_quasiorders(n)


def test_enumeration_n6_frozen():
    assert enumerate_quo(6, count_only=True) == QUO_COUNTS[6]


def test_enumeration_guard():
    with pytest.raises(BudgetExceeded) as info:
        enumerate_quo(8)
    assert info.value.estimate == 642779354


def test_snapshot_elements_closed_and_distinct():
    snap = enumerate_quo(3)
    assert len(snap) == 29 and len(set(snap.elements)) == 29
    assert all(r.closed for r in snap.elements)


def test_quleq_enumeration_contains_order():
    p = y_poset()
    snap = enumerate_quleq(p)
    assert all(p.order.issubset(r) for r in snap.elements)
    assert len(snap) == 14
    with pytest.raises(BudgetExceeded):
        count_quleq(antichain(6), max_elements=1000)


@pytest.mark.parametrize("p", BUILT_IN, ids=lambda p: f"n{p.n}")
def test_qum_closed_form_exhaustive(p):
    for x in range(p.n):
        for y in range(p.n):
            assert as_set(qum_pair(p, x, y)) == qum(p.n, p.covers, x, y)


def test_nabla_plus_on_component():
    p = cardinal_sum([chain(1), chain(1)])
    r = nabla_plus(p, [0, 1])
    assert (1, 0) in r and (0, 2) not in r


def test_phi_rejects_two_elements_of_a_component():
    with pytest.raises(BadInput):
        phi_embed(chain(1), [0, 1], QuasiRel.identity(2))


def test_closure_reaches_quo3_with_witnesses():
    # three equivalences and one quasiorder; found by exhaustive search, checked below
    gens = [
        QuasiRel.from_pairs(3, [(2, 0), (2, 1)]).closure(),
        QuasiRel.from_pairs(3, [(0, 2), (2, 0)]).closure(),
        QuasiRel.from_pairs(3, [(0, 1), (1, 0)]).closure(),
        QuasiRel.from_pairs(3, [(1, 2), (2, 1)]).closure(),
    ]
    atoms = [quo_pair(3, x, y) for x in range(3) for y in range(3) if x != y]
    res = close_with_witnesses(gens, targets=atoms, stop_when_found=False, max_elements=None)
    assert res.complete and not res.missing
    for t in range(len(atoms)):
        term = res.target_term(t)
        assert evaluate(term, _ctx(gens)) == atoms[t]


def _ctx(gens, consts=None):
    from quleq.latterm import EvalContext

    return EvalContext(gens, QUO_OPS, consts)


def test_closure_provenance_is_acyclic():
    gens = [quo_pair(4, 0, 1), quo_pair(4, 2, 3), quo_pair(4, 1, 2).inverse().closure()]
    res = close_with_witnesses(gens, max_elements=None)
    snap = res.snapshot
    for k, prov in enumerate(snap.provenance):
        if prov[0] in ("meet", "join"):
            assert prov[1] < k and prov[2] < k


def test_closure_budget():
    gens = [quo_pair(5, x, (x + 1) % 5) for x in range(5)] + [quo_pair(5, 0, 2)]
    res = close_with_witnesses(gens, max_elements=50)
    assert not res.complete and res.budget_hit


def test_closure_with_bounds_generates_small_boolean():
    p = chain(2)
    a, b = qum_pair(p, 1, 0), qum_pair(p, 2, 1)
    res = close_with_witnesses([a, b], constants={"bot": p.order, "top": QuasiRel.full(3)}, max_elements=None)
    assert len(res.snapshot) == count_quleq(p) == 4


def test_finite_lattice_of_quo3():
    lat = FiniteLattice.from_relations(enumerate_quo(3).elements)
    assert len(lat) == 29
    atoms = [i for i in range(29) if lat.covers(lat.bottom, i)]
    assert len(atoms) == 6
    assert lat.generates(atoms)
    assert not lat.generates(atoms[:1])


def test_closure_matches_enumeration_on_figure_like_sum():
    p = cardinal_sum([chain(1)] * 3)
    gens = [qum_pair(p, a, b) for a in range(p.n) for b in range(p.n) if a != b]
    res = close_with_witnesses(gens, constants={"bot": p.order, "top": QuasiRel.full(p.n)}, max_elements=None)
    assert len(res.snapshot) == count_quleq(p) == 6426


@settings(max_examples=300)
@given(st.lists(quasiorders(n=6), min_size=1, max_size=16))
def test_batch_close_matches_scalar(rels):
    arr = batch.stack(rels)
    raw = arr.copy()
    # perturb: join pairs elementwise then close in batch
    joined = batch.joins(raw, raw[::-1])
    for i, r in enumerate(batch.unstack(joined)):
        assert r == join(rels[i], rels[len(rels) - 1 - i])
    packed = batch.pack(arr)
    assert np.array_equal(batch.unpack(packed, 6), arr)
    assert np.array_equal(batch.close_packed(packed, 6), packed)
