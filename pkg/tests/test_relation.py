import pytest
from hypothesis import given

from oracles import as_set, closure
from quleq.errors import BadInput
from quleq.relation import QuasiRel, big_join, big_meet, join, meet, tr_close
from strategies import relations


def test_identity_and_full():
    i3 = QuasiRel.identity(3)
    assert as_set(i3) == {(0, 0), (1, 1), (2, 2)}
    assert len(QuasiRel.full(3)) == 9
    assert i3.closed and i3.is_antisymmetric()


def test_closure_small():
    r = QuasiRel.from_pairs(3, [(0, 1), (1, 2)])
    assert (0, 2) in r.closure()
    assert r.closure() == tr_close(r)


def test_join_is_closure_of_union():
    a = QuasiRel.from_pairs(3, [(0, 1)]).closure()
    b = QuasiRel.from_pairs(3, [(1, 2)]).closure()
    assert (0, 2) in join(a, b)
    assert meet(a, b) == QuasiRel.identity(3)


def test_dimension_mismatch():
    with pytest.raises(BadInput):
        meet(QuasiRel.identity(2), QuasiRel.identity(3))


def test_big_ops_empty():
    assert big_join([], n=3) == QuasiRel.identity(3)
    assert big_meet([], n=3) == QuasiRel.full(3)


def test_encoding_layout():
    # row-major, most significant bit first
    r = QuasiRel.from_pairs(3, [(0, 1)]).closure()
    assert r.to_bytes() == bytes([0b11001000, 0b10000000])
    assert len(QuasiRel.identity(5).to_bytes()) == 4


def test_decode_rejects_bad_padding():
    with pytest.raises(BadInput):
        QuasiRel.from_bytes(3, bytes([0, 1]))
    with pytest.raises(BadInput):
        QuasiRel.decode(b"\x00")


@given(relations())
def test_encode_roundtrip(r):
    assert QuasiRel.decode(r.encode()) == r
    assert QuasiRel.from_b64(r.to_b64()) == r


@given(relations(max_n=6))
def test_closure_matches_oracle(r):
    assert as_set(r.closure()) == closure(r.n, as_set(r))
