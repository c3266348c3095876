"""Acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL - detail`` line (also collected into the
pytest terminal summary).  Run standalone with ``python3 tests/test_acceptance.py``.
Set ``QULEQ_STRETCH=1`` to include the Quo(7) enumeration.
"""

import os
import random
import re
import subprocess
import sys
import time
from pathlib import Path

import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from quleq.authsim import challenge, flip_bit, keygen, respond, run_sessions, verify, vernam_key, vernam_xor
from quleq.eqslat import TEST_LATTICES, all_instances, lift_solution, reduce_cnfhk, sat_brute, solve_brute
from quleq.genset.certificates import build_certificates
from quleq.genset.functions import lasp, singleton_recovered
from quleq.genset.search import minimal_generating_size, tree_parameter
from quleq.genset.synth import synthesize, verify_full
from quleq.poset import antichain, cardinal_sum, chain, y_poset
from quleq.quolattice import FiniteLattice, count_quleq, enumerate_quleq, enumerate_quo, qum_pair
from quleq.report import corollary_rows, figure_rows

HERE = Path(__file__).resolve().parent


def record(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_enumeration():
    t0 = time.monotonic()
    got = {n: enumerate_quo(n, count_only=True) for n in (3, 4, 5)}
    secs = time.monotonic() - t0
    want = {n: oracles.count_quasiorders(n) for n in (3, 4, 5)}
    ok = got == want == {3: 29, 4: 355, 5: 6942} and secs < 10
    record(1, ok, f"Quo(3..5) = {got[3]}, {got[4]}, {got[5]} in {secs:.2f}s (brute-force oracle agrees: {got == want})")


@pytest.mark.stretch
@pytest.mark.skipif(os.environ.get("QULEQ_STRETCH") != "1", reason="set QULEQ_STRETCH=1 for the Quo(7) run")
def test_criterion_1_stretch_quo7():
    t0 = time.monotonic()
    count = enumerate_quo(7, bound=None, count_only=True)
    secs = time.monotonic() - t0
    record(1, count == 9535241 and secs < 600, f"stretch: Quo(7) = {count} in {secs:.1f}s")


def test_criterion_2_chains():
    problems, notes = [], []
    for n in range(1, 11):
        t0 = time.monotonic()
        p = chain(n)
        size = count_quleq(p)
        plan = synthesize(p)
        res = verify_full(plan)
        secs = time.monotonic() - t0
        if size != 2**n or plan.size != lasp(n) or not res["ok"] or secs >= 5:
            problems.append(f"n={n}: |Quleq|={size} |E|={plan.size} closure ok={res['ok']} {secs:.1f}s")
    for n in (1, 2, 3):
        t0 = time.monotonic()
        lat = FiniteLattice.from_relations(enumerate_quleq(chain(n)).elements)
        k, _ = minimal_generating_size(lat, lasp(n))
        secs = time.monotonic() - t0
        notes.append(f"n={n}: smallest generating set {k}, lasp {lasp(n)}")
        if k != lasp(n) or secs >= 30:
            problems.append(f"n={n}: a generating set of size {k} < lasp(n)={lasp(n)} exists (bounds are free in a complete lattice)")
    detail = "chains 1..10: |Quleq| = 2^n, |E| = lasp(n), full closure; " + "; ".join(notes)
    record(2, not problems, detail + ("" if not problems else " | " + "; ".join(problems)))


def test_criterion_3_formulas():
    t0 = time.monotonic()
    rows = corollary_rows(compute=False)
    bad = [r for r in rows if r["formula_stated_params"] != r["stated"]]
    pick = lambda case: [r["formula_stated_params"] for r in rows if r["case"] == case]
    b = [r for r in rows if r["case"] == "b"]
    b_ok = all(r["formula_stated_params"] == (10 if "+A2" not in r["family"] else 8) + r["lasp"] for r in b)
    secs = time.monotonic() - t0
    ok = not bad and pick("a") == [4] and b_ok and pick("c") == [80, 78] and pick("d") == [21, 15] and secs < 1
    y = corollary_rows(compute=True)
    y_computed = [r["formula_computed_params"] for r in y if r["case"] == "d"]
    record(
        3,
        ok,
        f"(a) 4, (b) 10+lasp / 8+lasp for lengths 1..6, (c) {pick('c')}, (d) {pick('d')} in {secs:.3f}s; "
        f"note: computed Y-poset parameters give {y_computed}",
    )


def test_criterion_4_full_closure():
    t0 = time.monotonic()
    plan = synthesize(antichain(5))
    res = verify_full(plan)
    secs = time.monotonic() - t0
    parts = [f"antichain(5): |E|={plan.size}, closure {res['closure_size']} ({secs:.1f}s)"]
    ok = plan.size == 4 and res["ok"] and res["closure_size"] == 6942 and secs < 60
    for name, pieces in (
        ("chain2+chain2+A2", [chain(2), chain(2), antichain(2)]),
        ("chain1+chain1+A2", [chain(1), chain(1), antichain(2)]),
        ("3 x chain1", [chain(1)] * 3),
    ):
        p = cardinal_sum(pieces)
        size = count_quleq(p, max_elements=None)
        if size > 10**5:
            parts.append(f"{name}: |Quleq|={size} above 10^5, not closed")
            continue
        r = verify_full(synthesize(p))
        ok = ok and r["ok"]
        parts.append(f"{name}: closure {r['closure_size']} = |Quleq| {size}: {r['ok']}")
    record(4, ok, "; ".join(parts))


def test_criterion_5_certificates():
    t0 = time.monotonic()
    p = cardinal_sum([y_poset()] * 5)
    plan = build_certificates(synthesize(p), verify=True)
    secs = time.monotonic() - t0
    pairs = [(a, b) for a in range(p.n) for b in range(p.n) if a != b]
    covered = all(k in plan.certificates for k in pairs)
    ok = covered and len(pairs) == 380 and plan.size <= 21 and secs < 120
    # verify_certificates already compared every term with qum(a, b); spot-check one anyway
    from quleq.genset.certificates import eval_context
    from quleq.latterm import evaluate

    a, b = 19, 0
    ok = ok and evaluate(plan.certificates[(a, b)], eval_context(plan)) == qum_pair(p, a, b)
    record(5, ok, f"5 x Y: {len(pairs)} pairs certified over |E|={plan.size} (mode {plan.mode}) in {secs:.1f}s")


def test_criterion_6_figures():
    rows = figure_rows()
    f1 = {r["mode"]: r for r in rows if r["case"] == "figure1"}
    f2 = {r["mode"]: r for r in rows if r["case"] == "figure2"}
    ok = (
        all(r["caption_matches"] for r in rows)
        and f1["A"]["formula_stated_params"] == 23
        and f1["B"]["formula_stated_params"] == 22
        and "discrepancy" in f1["B"]["flag"]
        and f2["B"]["formula_stated_params"] == 12
        and not f2["B"]["flag"]
    )
    params = f1["A"]["parameters"], f2["A"]["parameters"]
    record(6, ok, f"figure1 {params[0]} -> A 23, B 22 (flagged vs stated 23); figure2 {params[1]} -> 12")


def test_criterion_7_boolean():
    t0 = time.monotonic()
    rec = all(singleton_recovered(m) for m in range(1, 1001))
    table = [lasp(n) for n in (1, 2, 3, 4, 5, 6)] + [lasp(1000), lasp(10**20), lasp(10**100)]
    secs = time.monotonic() - t0
    ok = rec and table == [1, 2, 3, 4, 4, 4, 13, 70, 337] and secs < 5
    record(7, ok, f"singleton recovery for m <= 1000: {rec}; lasp table {table} in {secs:.2f}s")


def test_criterion_8_tree_parameters():
    t0 = time.monotonic()
    single = tree_parameter(chain(0)).value
    chains = [tree_parameter(chain(k)).value for k in range(1, 5)]
    y = tree_parameter(y_poset())
    secs = time.monotonic() - t0
    ok = single == 0 and chains == [1, 1, 1, 1] and y.value == 3 and secs < 30
    detail = f"singleton {single}, chains {chains}, Y-poset {y.value} (expected 3) in {secs:.1f}s"
    if y.value != 3:
        detail += f"; exhaustive search finds {len(y.Y)} extra element(s) plus the reversed-cover atoms generating all {y.lattice_size} elements"
    record(8, ok, detail)


def test_criterion_9_reduction():
    t0 = time.monotonic()
    checked = lifted = 0
    mismatches = []
    for name in ("chain2", "chain3", "N5", "M3"):
        lat = TEST_LATTICES[name]()
        covers = [(a, b) for a in range(len(lat)) for b in range(len(lat)) if lat.covers(a, b)]
        for k, h in enumerate(all_instances(4, 2, 2)):
            a0, a1 = covers[k % len(covers)]
            g = sat_brute(h)
            s = reduce_cnfhk(h, lat, a0, a1)
            if (g is not None) != solve_brute(s).solvable:
                mismatches.append((name, h))
            if g is not None:
                lifted += 1
                if not s.holds(lift_solution(h, lat, a0, a1, g)):
                    mismatches.append((name, h, "lift"))
            checked += 1
    secs = time.monotonic() - t0
    ok = not mismatches and secs < 120
    record(9, ok, f"{checked} instance/lattice pairs, {lifted} witnesses lifted, {len(mismatches)} mismatches in {secs:.1f}s")


def test_criterion_10_protocol():
    plan = synthesize(antichain(5))
    key = keygen(plan.poset, plan, pad=2, seed=0)
    t0 = time.monotonic()
    seeds = range(100)
    genuine = sum(v.accept for v, _ in run_sessions(key, seeds))
    rng = random.Random(0)
    flips = [(rng.randrange(key.b), rng.randrange(key.n * key.n)) for _ in seeds]
    tampered = sum(not verify(key, challenge(key, s), flip_bit(respond(key, challenge(key, s)), *flips[s])).accept for s in seeds)
    replay = sum(not verify(key, challenge(key, 10_000 + s), respond(key, challenge(key, s))).accept for s in seeds)
    vern = True
    for s in seeds:
        ks = vernam_key(respond(key, challenge(key, s)))
        msg = rng.randbytes(rng.randint(0, len(ks)))
        vern &= vernam_xor(ks, vernam_xor(ks, msg)) == msg
    secs = time.monotonic() - t0
    ok = genuine == tampered == replay == 100 and vern and secs < 10
    record(10, ok, f"accepted {genuine}/100, tamper-rejected {tampered}/100, replay-rejected {replay}/100, Vernam identity {vern} in {secs:.1f}s")


SUITES = [
    "test_lattice_laws",
    "test_closed_form_equals_closure",
    "test_independence_principle",
    "test_convexity",
    "test_phi_embedding",
    "test_forest_edge_independence",
]


def test_criterion_11_property_suites():
    env = dict(os.environ, HYPOTHESIS_PROFILE="default")
    out = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(HERE / "test_properties.py"), "--hypothesis-show-statistics"],
        capture_output=True,
        text=True,
        cwd=HERE.parent,
        env=env,
    )
    counts = {}
    sections = re.split(r"^\S*::(test_\w+):$", out.stdout, flags=re.M)
    stats = dict(zip(sections[1::2], sections[2::2]))
    for name in SUITES:
        # one line per phase (reuse, generate, ...); add them up
        found = re.findall(r"(\d+) passing examples, (\d+) failing", stats.get(name, ""))
        counts[name] = (sum(int(a) for a, _ in found), sum(int(b) for _, b in found)) if found else (0, -1)
    ok = out.returncode == 0 and all(p >= 1000 and f == 0 for p, f in counts.values())
    detail = ", ".join(f"{k[5:]} {p}" for k, (p, _) in counts.items())
    record(11, ok, f"standalone run exit {out.returncode}; passing cases: {detail}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
