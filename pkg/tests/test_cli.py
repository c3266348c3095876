import json
import subprocess
import sys

import pytest

from quleq.cli import main, resolve_poset


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out.strip().splitlines()[-1])


def test_resolve_poset():
    assert resolve_poset("antichain5").n == 5
    assert resolve_poset("5xy").n == 20
    assert resolve_poset("chain2+chain2+antichain2").n == 8
    with pytest.raises(Exception):
        resolve_poset("torus3")


def test_quo_enum(capsys):
    assert run(capsys, "quo", "enum", "--n", "4")[1]["count"] == 355


def test_quo_enum_refused(capsys):
    code, data = run(capsys, "quo", "enum", "--n", "9")
    assert code == 3 and data["error"] == "budget"


def test_bad_input_code(capsys):
    code, data = run(capsys, "poset", "params", "--poset", "nonsense")
    assert code == 4


def test_gen_synth_full(capsys):
    code, data = run(capsys, "gen", "synth", "--poset", "antichain5", "--verify", "full")
    assert code == 0
    assert data["size"] == 4 and data["verification"]["closure_size"] == 6942


def test_gen_certs_writes_tsv(capsys, tmp_path):
    out = tmp_path / "c.tsv"
    code, data = run(capsys, "gen", "certs", "--poset", "3xchain1", "--out", str(out))
    assert code == 0 and len(data["certificates"]) == 30
    assert out.read_text().startswith("a\tb\tstep\tterm\n")


def test_gen_verify_budget(capsys):
    code, data = run(capsys, "gen", "verify", "--poset", "chain2+chain2+antichain2", "--method", "full", "--budget-elems", "1000")
    assert code == 3


def test_eqs_pipeline(capsys, tmp_path):
    cnf = tmp_path / "h.cnf"
    cnf.write_text("P 1 3 5\nN 1 2\nN 3 4\nP 2 3 5\n")
    eqs = tmp_path / "h.eqs"
    code, data = run(capsys, "eqs", "reduce", "--cnf", str(cnf), "--lattice", "M3", "--a0", "a", "--a1", "1", "--out", str(eqs))
    assert code == 0 and data["k"] == 7 and data["b"] == 4
    code, data = run(capsys, "eqs", "solve", "--eqs", str(eqs), "--lattice", "M3")
    assert data["status"] == "solved" and data["assignment"]["xm1"] == "a"
    code, data = run(capsys, "eqs", "check", "--cnf", str(cnf), "--lattice", "N5", "--a0", "0", "--a1", "b")
    assert code == 0 and data["ok"]


def test_term_eval(capsys):
    code, data = run(capsys, "term", "eval", "--term", "x0 v (x1 ^ x2)", "--lattice", "N5", "--assign", "x0=a", "x1=b", "x2=c")
    assert data["value"] == "a"


def test_bool_gens(capsys):
    data = run(capsys, "bool", "gens", "--m", "6")[1]
    assert data["lasp"] == 4 and data["singletons_recovered"]


def test_auth_commands(capsys, tmp_path):
    key = tmp_path / "key.json"
    code, data = run(capsys, "auth", "keygen", "--poset", "antichain5", "--pad", "2", "--out", str(key))
    assert code == 0 and len(data["h"]) == 6
    code, data = run(capsys, "auth", "demo", "--key", str(key), "--sessions", "20")
    assert code == 0 and data["ok"]
    tr = tmp_path / "t.jsonl"
    code, data = run(capsys, "auth", "serve-loopback", "--key", str(key), "--sessions", "5", "--out", str(tr))
    assert code == 0 and len(tr.read_text().splitlines()) == 20


def test_report_files(capsys, tmp_path):
    code, data = run(capsys, "report", "corollary", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "corollary.png").stat().st_size > 0
    tsv = (tmp_path / "corollary.tsv").read_text()
    assert "\t80\t" in tsv and "\t78\t" in tsv


def test_deterministic(capsys):
    a = run(capsys, "gen", "synth", "--poset", "5xy", "--seed", "4", "--verify", "none")[1]
    b = run(capsys, "gen", "synth", "--poset", "5xy", "--seed", "4", "--verify", "none")[1]
    assert a == b


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "quleq", "quo", "enum", "--n", "3"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["count"] == 29
