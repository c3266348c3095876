import pytest

from quleq.eqslat import (
    TEST_LATTICES,
    CnfHK,
    EqSystem,
    all_instances,
    chain_lattice,
    format_cnf,
    format_equations,
    lift_solution,
    n5,
    parse_cnf,
    parse_equations,
    reduce_cnfhk,
    sat_brute,
    solve_brute,
)
from quleq.errors import BadInput, BudgetExceeded
from quleq.latterm import Var, parse

SAMPLE_H = CnfHK(5, [(1, 3, 5), (2, 3, 5)], [(1, 2), (3, 4)])

# every positive triple and every negative pair on 4 variables: at most one variable
# may be true, yet each triple needs one, and the triple avoiding it fails
UNSAT_H = CnfHK(4, [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)], [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])


def covering_pairs(lat):
    return [(a, b) for a in range(len(lat)) for b in range(len(lat)) if lat.covers(a, b)]


def test_single_equation():
    lat = n5()
    sol = solve_brute(parse_equations("x1 = b", lat))
    assert sol.solvable and lat.names[sol.assignment[1]] == "b"


def test_forced_contradiction():
    sol = solve_brute(parse_equations("x1 ^ x2 = 1\nx1 v x2 = 0", chain_lattice(2)))
    assert sol.status == "unsolvable" and sol.checked == 4


def test_first_solution_is_lexicographic():
    lat = chain_lattice(3)
    sol = solve_brute(parse_equations("x1 v x2 = 1", lat))
    assert sol.assignment == {1: 0, 2: 2}


def test_budget_is_not_unsolvable():
    s = EqSystem(chain_lattice(2), [(Var(i), 0) for i in range(30)])
    with pytest.raises(BudgetExceeded):
        solve_brute(s, budget=1000)


def test_cnf_validation():
    with pytest.raises(BadInput):
        CnfHK(3, [], [(1, 1)])
    with pytest.raises(BadInput):
        CnfHK(3, [(1, 2)], [])
    with pytest.raises(BadInput):
        CnfHK(3, [(1, 2, 4)], [])
    with pytest.raises(BadInput):
        parse_cnf("Q 1 2")


def test_sat_examples():
    assert sat_brute(SAMPLE_H) is not None
    assert sat_brute(CnfHK(3, [(1, 2, 3)], [(1, 2), (1, 3), (2, 3)])) == (0, 0, 1)
    assert sat_brute(UNSAT_H) is None
    with pytest.raises(BudgetExceeded):
        sat_brute(CnfHK(25))


def test_reduction_shape_on_example():
    s = reduce_cnfhk(SAMPLE_H, chain_lattice(2), "0", "1")
    assert s.k == 7 and s.b == 4
    assert solve_brute(s).solvable


def test_reduction_requires_a_cover():
    with pytest.raises(BadInput):
        reduce_cnfhk(SAMPLE_H, chain_lattice(3), "0", "1")


def test_single_negative_clause_term():
    s = reduce_cnfhk(CnfHK(2, [], [(1, 2)]), chain_lattice(2), 0, 1)
    p2, _ = s.equations[3]
    assert p2 == parse("((x1 v xm1) ^ x0) ^ ((x2 v xm1) ^ x0)")
    p1, _ = s.equations[2]
    assert p1 == parse("#a1")


def test_size_is_linear():
    small = reduce_cnfhk(CnfHK(4, [(1, 2, 3)], [(1, 2)]), n5(), "0", "a").term_nodes()
    big = reduce_cnfhk(CnfHK(4, [(1, 2, 3)] * 1 + [(2, 3, 4)], [(1, 2), (3, 4)]), n5(), "0", "a").term_nodes()
    per_literal = 5  # masked variable: two operators and three leaves
    assert big - small <= per_literal * (3 + 2) + 2


def test_file_roundtrip():
    assert parse_cnf(format_cnf(SAMPLE_H), 5) == SAMPLE_H
    lat = n5()
    s = reduce_cnfhk(SAMPLE_H, lat, "0", "a")
    back = parse_equations(format_equations(s), lat, {"a0": "0", "a1": "a"})
    assert [t for t, _ in back.equations] == [t for t, _ in s.equations]


def _instances(max_clauses=4):
    for h in all_instances(4, max_pos=4, max_neg=4):
        if len(h.pos_clauses) + len(h.neg_clauses) <= max_clauses:
            yield h


@pytest.mark.parametrize("name", sorted(TEST_LATTICES))
def test_reduction_equivalence(name):
    lat = TEST_LATTICES[name]()
    pairs = covering_pairs(lat)
    for k, h in enumerate(list(_instances()) + [UNSAT_H]):
        a0, a1 = pairs[k % len(pairs)]
        g = sat_brute(h)
        s = reduce_cnfhk(h, lat, a0, a1)
        assert (g is not None) == solve_brute(s).solvable
        if g is not None:
            assert s.holds(lift_solution(h, lat, a0, a1, g))
