"""Command-line front end.

Every command prints one JSON document on stdout and a short human summary on stderr.
Exit codes: 0 ok, 2 verification failed, 3 budget refused, 4 bad input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .errors import BadInput, BudgetExceeded, VerificationFailed
from .poset import Poset, antichain, cardinal_sum, chain, compute_params, figure1, figure2, y_poset

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4

_ATOM = re.compile(r"^(?:(\d+)\s*[x*]\s*)?(antichain|chain|y|figure1|figure2)(\d*)$")


def resolve_poset(spec: str) -> Poset:
    """``antichain5``, ``chain3``, ``y``, ``figure1``, ``figure2``, repetitions ``5xy`` and
    cardinal sums joined by ``+`` (e.g. ``chain2+chain2+antichain2``); anything naming an
    existing file is read as a poset JSON document."""
    path = Path(spec)
    if path.is_file():
        return Poset.loads(path.read_text())
    parts = []
    for token in spec.replace(" ", "").split("+"):
        m = _ATOM.match(token)
        if m is None:
            raise BadInput(f"cannot read poset {token!r}")
        rep, kind, num = int(m.group(1) or 1), m.group(2), m.group(3)
        if kind in ("antichain", "chain") and not num:
            raise BadInput(f"{kind} needs a size, e.g. {kind}3")
        if kind not in ("antichain", "chain") and num:
            raise BadInput(f"{kind} takes no size")
        one = {
            "antichain": lambda: antichain(int(num)),
            "chain": lambda: chain(int(num)),
            "y": y_poset,
            "figure1": figure1,
            "figure2": figure2,
        }[kind]()
        parts.extend([one] * rep)
    return parts[0] if len(parts) == 1 else cardinal_sum(parts)


def _lattice(name: str):
    from .eqslat import TEST_LATTICES

    if name not in TEST_LATTICES:
        raise BadInput(f"unknown lattice {name!r}; choose from {sorted(TEST_LATTICES)}")
    return TEST_LATTICES[name]()


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise BadInput(f"cannot read {path}: {exc}") from None


class Result:
    def __init__(self, data: dict, summary: str, code: int = EXIT_OK):
        self.data, self.summary, self.code = data, summary, code


# -- poset / quo --------------------------------------------------------------------------


def cmd_poset_build(a) -> Result:
    p = resolve_poset(a.poset)
    return Result(p.to_dict(), f"poset with {p.n} elements, {len(p.components)} components")


def cmd_poset_params(a) -> Result:
    p = resolve_poset(a.poset)
    pr = compute_params(p)
    return Result(pr.to_dict(), " ".join(f"{k}={v}" for k, v in pr.to_dict().items() if k != "selectors"))


def cmd_quo_enum(a) -> Result:
    from .quolattice import count_quleq, enumerate_quo

    t0 = time.monotonic()
    if a.poset:
        count = count_quleq(resolve_poset(a.poset), max_elements=a.budget_elems)
        what = f"quasiorders above {a.poset}"
    else:
        count = enumerate_quo(a.n, bound=None if a.allow_large else 6, count_only=True)
        what = f"Quo({a.n})"
    secs = time.monotonic() - t0
    return Result({"n": a.n, "poset": a.poset, "count": count, "seconds": round(secs, 3)}, f"{what}: {count}")


# -- generating sets -------------------------------------------------------------------------


def _synth(a):
    from .genset.synth import synthesize

    p = resolve_poset(a.poset)
    return synthesize(p, mode=a.mode, seed=a.seed, search_secs=a.budget_secs)


def _verification(plan, method: str, budget_elems) -> dict:
    from .genset.certificates import build_certificates
    from .genset.synth import verify_full

    if method == "none":
        return {"method": "none"}
    if method == "full":
        return verify_full(plan, max_elements=budget_elems)
    build_certificates(plan, verify=False)
    from .genset.certificates import verify_certificates

    try:
        checked = verify_certificates(plan)
        return {"method": "certificates", "checked": checked, "ok": True}
    except VerificationFailed as exc:
        return {"method": "certificates", "ok": False, "error": str(exc)}


def _plan_summary(plan) -> dict:
    return {
        "mode": plan.mode,
        "size": plan.size,
        "bound": plan.bound,
        "params": plan.params.to_dict(),
        "parts": {tag: sum(1 for x in plan.parts if x.tag == tag) for tag in ("F1", "F2", "G", "H")},
        "warnings": plan.warnings,
    }


def cmd_gen_synth(a) -> Result:
    plan = _synth(a)
    data = _plan_summary(plan)
    data["verification"] = _verification(plan, a.verify, a.budget_elems)
    if a.out:
        Path(a.out).write_text(plan.dumps() + "\n")
        data["plan_file"] = a.out
    ok = data["verification"].get("ok", True)
    summary = f"|E|={plan.size} (bound {plan.bound}, mode {plan.mode})"
    if "closure_size" in data["verification"]:
        summary += f", closure {data['verification']['closure_size']} of {data['verification']['quleq_size']}"
    if "checked" in data["verification"]:
        summary += f", {data['verification']['checked']} certificates verified"
    return Result(data, summary, EXIT_OK if ok else EXIT_VERIFY)


def cmd_gen_verify(a) -> Result:
    a.verify = a.method
    a.out = None
    return cmd_gen_synth(a)


def cmd_gen_certs(a) -> Result:
    from .genset.certificates import build_certificates
    from .latterm import to_text

    plan = _synth(a)
    build_certificates(plan, verify=True)
    rows = [{"a": x, "b": y, "step": plan.steps[(x, y)], "term": to_text(t)} for (x, y), t in sorted(plan.certificates.items())]
    if a.out:
        with open(a.out, "w") as fh:
            fh.write("a\tb\tstep\tterm\n")
            for r in rows:
                fh.write(f"{r['a']}\t{r['b']}\t{r['step']}\t{r['term']}\n")
    data = _plan_summary(plan)
    data["certificates"] = rows
    return Result(data, f"{len(rows)} certificates over |E|={plan.size}, all verified")


def cmd_bool_gens(a) -> Result:
    from .genset.functions import boolean_generators, lasp, singleton_recovered, sperner_assignment

    k, blocks = sperner_assignment(a.m)
    gens = boolean_generators(a.m)
    data = {
        "m": a.m,
        "lasp": lasp(a.m),
        "k": k,
        "blocks": [sorted(b) for b in blocks],
        "generators": [sorted(x) for x in gens],
        "singletons_recovered": singleton_recovered(a.m),
    }
    return Result(data, f"{len(gens)} generators for the Boolean lattice on {a.m} atoms")


# -- terms / equations --------------------------------------------------------------------------


def cmd_term_eval(a) -> Result:
    from .latterm import EvalContext, evaluate, parse, to_text

    term = parse(a.term)
    if a.lattice:
        from .eqslat import _table_ops

        lat = _lattice(a.lattice)
        assign = {}
        for item in a.assign:
            name, _, val = item.partition("=")
            m = re.fullmatch(r"x(m?\d+)", name)
            if m is None or val not in lat.names:
                raise BadInput(f"bad assignment {item!r}")
            idx = -int(m.group(1)[1:]) if m.group(1).startswith("m") else int(m.group(1))
            assign[idx] = lat.names.index(val)
        value = lat.names[int(evaluate(term, EvalContext(assign, _table_ops(lat))))]
        return Result({"term": to_text(term), "value": value}, f"{to_text(term)} = {value}")
    from .genset.certificates import eval_context

    plan = _synth(a)
    rel = evaluate(term, eval_context(plan))
    pairs = sorted(x for x in rel.pairs() if x[0] != x[1])
    return Result({"term": to_text(term), "value_b64": rel.to_b64(), "pairs": pairs}, f"{len(pairs)} non-diagonal pairs")


def cmd_eqs_reduce(a) -> Result:
    from .eqslat import format_equations, parse_cnf, reduce_cnfhk

    h = parse_cnf(_read(a.cnf), a.m)
    lat = _lattice(a.lattice)
    sys_ = reduce_cnfhk(h, lat, a.a0, a.a1)
    text = format_equations(sys_)
    if a.out:
        Path(a.out).write_text(text)
    data = {"k": sys_.k, "b": sys_.b, "equations": text.splitlines(), "term_nodes": sys_.term_nodes(), "cnf_length": h.length}
    return Result(data, f"{sys_.b} equations in {sys_.k} unknowns, {sys_.term_nodes()} term nodes")


def _var_name(i: int) -> str:
    return f"xm{-i}" if i < 0 else f"x{i}"


def cmd_eqs_solve(a) -> Result:
    from .eqslat import parse_equations, solve_brute

    lat = _lattice(a.lattice)
    consts = dict(item.split("=", 1) for item in a.const)
    sys_ = parse_equations(_read(a.eqs), lat, consts)
    sol = solve_brute(sys_, budget=a.budget_elems or 10**7)
    assignment = {_var_name(v): lat.names[x] for v, x in sol.assignment.items()} if sol.solvable else None
    return Result({"status": sol.status, "assignment": assignment, "checked": sol.checked}, f"{sol.status} after {sol.checked} assignments")


def cmd_eqs_check(a) -> Result:
    from .eqslat import all_instances, lift_solution, parse_cnf, reduce_cnfhk, sat_brute, solve_brute

    lat = _lattice(a.lattice)
    instances = list(all_instances(a.max_vars)) if a.all else [parse_cnf(_read(a.cnf), a.m)]
    mismatches, lifted = [], 0
    for h in instances:
        g = sat_brute(h)
        sys_ = reduce_cnfhk(h, lat, a.a0, a.a1)
        sol = solve_brute(sys_, budget=a.budget_elems or 10**7)
        if (g is not None) != sol.solvable:
            mismatches.append({"m": h.m, "pos": h.pos_clauses, "neg": h.neg_clauses, "sat": g is not None})
        if g is not None:
            if not sys_.holds(lift_solution(h, lat, a.a0, a.a1, g)):
                mismatches.append({"m": h.m, "pos": h.pos_clauses, "neg": h.neg_clauses, "lift": "failed"})
            lifted += 1
    data = {"instances": len(instances), "lifted": lifted, "mismatches": mismatches, "ok": not mismatches}
    return Result(data, f"{len(instances)} instances, {len(mismatches)} mismatches", EXIT_OK if not mismatches else EXIT_VERIFY)


# -- protocol ------------------------------------------------------------------------------------


def _key(a):
    from .authsim import SharedKey, keygen
    from .genset.synth import synthesize

    if getattr(a, "key", None):
        return SharedKey.from_dict(json.loads(_read(a.key)))
    p = resolve_poset(a.poset)
    plan = synthesize(p, seed=a.seed, search_secs=a.budget_secs)
    return keygen(p, plan, pad=a.pad, seed=a.seed, b=a.b, depth=a.depth, g=a.g)


def cmd_auth_keygen(a) -> Result:
    key = _key(a)
    d = key.to_dict()
    if a.out:
        Path(a.out).write_text(json.dumps(d, indent=1) + "\n")
    return Result(d, f"key with k={key.k} components over {key.n} points")


def cmd_auth_demo(a) -> Result:
    from .authsim import challenge, flip_bit, respond, run_sessions, verify

    key = _key(a)
    seeds = range(a.seed, a.seed + a.sessions)
    genuine = sum(v.accept for v, _ in run_sessions(key, seeds))
    tampered = sum(not v.accept for v, _ in run_sessions(key, seeds, tamper=lambda r: flip_bit(r, 0, 0)))
    replay = 0
    for s in seeds:
        old = respond(key, challenge(key, s))
        replay += not verify(key, challenge(key, s + 10**6), old).accept
    data = {"sessions": a.sessions, "genuine_accepted": genuine, "tampered_rejected": tampered, "replays_rejected": replay}
    ok = genuine == tampered == replay == a.sessions
    data["ok"] = ok
    return Result(data, f"accepted {genuine}, tamper-rejected {tampered}, replay-rejected {replay} of {a.sessions}", EXIT_OK if ok else EXIT_VERIFY)


def cmd_auth_serve(a) -> Result:
    from .authsim import run_sessions

    key = _key(a)
    results = run_sessions(key, range(a.seed, a.seed + a.sessions))
    lines = [line for _, tr in results for line in tr.lines]
    if a.out:
        Path(a.out).write_text("".join(x + "\n" for x in lines))
    accepted = sum(v.accept for v, _ in results)
    ok = accepted == a.sessions
    return Result({"sessions": a.sessions, "accepted": accepted, "messages": len(lines), "transcript": a.out, "ok": ok}, f"{accepted}/{a.sessions} sessions accepted", EXIT_OK if ok else EXIT_VERIFY)


def cmd_report_corollary(a) -> Result:
    from .report import corollary_report, to_tsv, write_report

    rep = corollary_report(a.ncmp)
    files = write_report(rep, a.out) if a.out else {}
    sys.stderr.write(to_tsv(rep["rows"]))
    return Result({"rows": rep["rows"], "files": files}, f"{len(rep['rows'])} rows, {len(rep['flagged'])} flagged")


# -- parser ------------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-elems", type=int, default=10**6, help="closure / enumeration element cap")
    p.add_argument("--budget-secs", type=float, default=120.0, help="search time cap in seconds")
    p.add_argument("--out", default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quleq", description=__doc__.splitlines()[0])
    top = ap.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, **kw):
        p = group.add_parser(name, **kw)
        _common(p)
        p.set_defaults(fn=fn)
        return p

    g = top.add_parser("poset").add_subparsers(dest="cmd", required=True)
    sub(g, "build", cmd_poset_build).add_argument("--poset", required=True)
    sub(g, "params", cmd_poset_params).add_argument("--poset", required=True)

    g = top.add_parser("quo").add_subparsers(dest="cmd", required=True)
    p = sub(g, "enum", cmd_quo_enum)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--poset", default=None, help="count the filter above this poset instead")
    p.add_argument("--allow-large", action="store_true", help="lift the n <= 6 guard")

    g = top.add_parser("gen").add_subparsers(dest="cmd", required=True)
    for name, fn in (("synth", cmd_gen_synth), ("verify", cmd_gen_verify), ("certs", cmd_gen_certs)):
        p = sub(g, name, fn)
        p.add_argument("--poset", required=True)
        p.add_argument("--mode", default="auto", choices=["auto", "A", "B", "C"])
        if name == "synth":
            p.add_argument("--verify", default="certs", choices=["full", "certs", "none"])
        if name == "verify":
            p.add_argument("--method", default="certs", choices=["full", "certs"])

    g = top.add_parser("bool").add_subparsers(dest="cmd", required=True)
    sub(g, "gens", cmd_bool_gens).add_argument("--m", type=int, required=True)

    g = top.add_parser("term").add_subparsers(dest="cmd", required=True)
    p = sub(g, "eval", cmd_term_eval)
    p.add_argument("--term", required=True)
    p.add_argument("--lattice", default=None)
    p.add_argument("--assign", nargs="*", default=[], help="x1=a x2=b ...")
    p.add_argument("--poset", default=None, help="evaluate over the generating set of this poset")
    p.add_argument("--mode", default="auto")

    g = top.add_parser("eqs").add_subparsers(dest="cmd", required=True)
    for name, fn in (("reduce", cmd_eqs_reduce), ("check", cmd_eqs_check)):
        p = sub(g, name, fn)
        p.add_argument("--cnf", default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--lattice", default="chain2")
        p.add_argument("--a0", default="0")
        p.add_argument("--a1", default="1")
        if name == "check":
            p.add_argument("--all", action="store_true", help="every instance with at most --max-vars variables")
            p.add_argument("--max-vars", type=int, default=4)
    p = sub(g, "solve", cmd_eqs_solve)
    p.add_argument("--eqs", required=True)
    p.add_argument("--lattice", default="chain2")
    p.add_argument("--const", nargs="*", default=[], help="name=element")

    g = top.add_parser("auth").add_subparsers(dest="cmd", required=True)
    for name, fn in (("keygen", cmd_auth_keygen), ("demo", cmd_auth_demo), ("serve-loopback", cmd_auth_serve)):
        p = sub(g, name, fn)
        p.add_argument("--poset", default="antichain5")
        p.add_argument("--key", default=None, help="key JSON written by 'auth keygen'")
        p.add_argument("--pad", type=int, default=2)
        p.add_argument("--b", type=int, default=8)
        p.add_argument("--depth", type=int, default=5)
        p.add_argument("--g", default="identity", help="identity or perm:<seed>")
        if name != "keygen":
            p.add_argument("--sessions", type=int, default=100)

    g = top.add_parser("report").add_subparsers(dest="cmd", required=True)
    sub(g, "corollary", cmd_report_corollary).add_argument("--ncmp", type=int, default=5)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    if a.group == "quo" and a.n is None and a.poset is None:
        ap.error("quo enum needs --n or --poset")
    if a.group == "eqs" and a.cmd in ("reduce", "check") and not a.cnf and not getattr(a, "all", False):
        ap.error("--cnf is required")
    try:
        res = a.fn(a)
    except VerificationFailed as exc:
        res = Result({"error": "verification", "detail": str(exc)}, f"verification failed: {exc}", EXIT_VERIFY)
    except BudgetExceeded as exc:
        res = Result({"error": "budget", "detail": str(exc), "estimate": exc.estimate}, f"budget refused: {exc}", EXIT_BUDGET)
    except BadInput as exc:
        res = Result({"error": "input", "detail": str(exc)}, f"bad input: {exc}", EXIT_INPUT)
    res.data["exit_code"] = res.code
    sys.stdout.write(json.dumps(res.data, default=str) + "\n")
    sys.stderr.write(res.summary + "\n")
    return res.code


if __name__ == "__main__":
    sys.exit(main())
