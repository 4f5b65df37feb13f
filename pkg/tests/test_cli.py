from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hedonica import build_gadget, construct_partition, sat_oracle
from hedonica.cli import main
from hedonica.io import fixture_text


@pytest.fixture
def cnf(tmp_path):
    path = tmp_path / "phi0.cnf"
    path.write_text(fixture_text("phi0"))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def reduce_to(capsys, tmp_path, *argv, name="game.json"):
    path = tmp_path / name
    code, _, _ = run(capsys, "reduce", *argv, "-o", path)
    assert code == 0
    return str(path)


def write_partition(tmp_path, theorem, name="part.json"):
    from hedonica.io import fixture
    f = fixture("phi0")
    part = construct_partition(theorem, f, sat_oracle(f))
    path = tmp_path / name
    path.write_text(json.dumps([sorted(b) for b in part]))
    return str(path)


def test_reduce_t1(capsys, tmp_path, cnf):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "reduce", "--theorem", "t1", "--family", "as", cnf, "-o", path)
    assert code == 0 and "agents: 66" in out
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["n"] == 66 and data["roles"]["theorem"] == "t1" and data["family"] == "as"
    assert list(data) == sorted(data)


def test_reduce_t2b_bipartite(capsys, tmp_path, cnf):
    code, out, _ = run(capsys, "reduce", "--theorem", "t2b", "--family", "wgame", cnf, "-o", tmp_path / "g.json")
    assert code == 0 and "agents: 31" in out and '"bipartite": true' in out


def test_reduce_bad_formula(capsys, tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 3 4\n1 2 0\n1 -2 -3 0\n-1 2 -3 0\n-1 -2 3 0\n")
    code, _, err = run(capsys, "reduce", "--theorem", "t1", "--family", "as", bad)
    assert code == 2 and "2 literals" in err


def test_reduce_cycle_and_dot(capsys, tmp_path):
    dot = tmp_path / "g.dot"
    path = reduce_to(capsys, tmp_path, "--cycle", "5", "--family", "as", "--emit-dot", dot)
    assert json.loads(open(path).read())["n"] == 5
    text = dot.read_text()
    assert text.startswith("graph") and text.count("--") == 5


def test_bad_flags_exit_2(capsys, cnf):
    assert run(capsys, "reduce", "--theorem", "t9", "--family", "as", cnf)[0] == 2
    assert run(capsys, "reduce", "--family", "nosuch", "--cycle", "5")[0] == 2
    assert run(capsys, "nosuch")[0] == 2


def test_construct_and_extract(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t3", "--family", "fhg", cnf)
    part = tmp_path / "p.json"
    assert run(capsys, "construct", "--theorem", "t3", "--assignment", "1 -2 -3", cnf, "-o", part)[0] == 0
    code, out, _ = run(capsys, "extract", game, part)
    assert code == 0
    assert json.loads(out) == {"assignment": {"1": True, "2": False, "3": False}, "satisfies": True}
    code, _, err = run(capsys, "construct", "--theorem", "t3", "--assignment", "1 2 -3", cnf)
    assert code == 2 and "does not satisfy" in err


def test_extract_failure_exit_1(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t3", "--family", "fhg", cnf)
    part = tmp_path / "p.json"
    part.write_text(json.dumps([[i] for i in range(60)]))
    code, out, _ = run(capsys, "extract", game, part)
    assert code == 1 and "undefined" in json.loads(out)["error"]


def test_check_exit_codes(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t2b", "--family", "wgame", cnf)
    part = write_partition(tmp_path, "t2b")
    code, out, _ = run(capsys, "check", "--concept", "ns", game, part)
    report = json.loads(out)
    assert code == 0 and report["stable"] and report["exhaustive"]
    singles = tmp_path / "s.json"
    singles.write_text(json.dumps([[i] for i in range(31)]))
    code, out, _ = run(capsys, "check", "--concept", "ns", game, singles)
    assert code == 1 and json.loads(out)["witness"]


def test_check_bounded_never_unstable(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t1", "--family", "as", cnf)
    part = write_partition(tmp_path, "t1")
    code, out, _ = run(capsys, "check", "--concept", "cr", "--max-size", "4", game, part)
    assert code == 3 and json.loads(out)["exhaustive"] is False


def test_check_malformed_partition(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t2b", "--family", "wgame", cnf)
    part = tmp_path / "p.json"
    part.write_text(json.dumps([[i] for i in range(30)]))
    assert run(capsys, "check", "--concept", "ns", game, part)[0] == 2
    part.write_text("{not json")
    assert run(capsys, "check", "--concept", "ns", game, part)[0] == 2


def test_solve(capsys, tmp_path, cnf):
    pent = reduce_to(capsys, tmp_path, "--cycle", "5", "--family", "as", name="p.json")
    code, out, _ = run(capsys, "solve", "--concept", "cr", pent)
    assert (code, json.loads(out)) == (1, "none")
    nine = reduce_to(capsys, tmp_path, "--cycle", "9", "--family", "as", name="n.json")
    code, out, _ = run(capsys, "solve", "--concept", "ns", nine)
    assert (code, json.loads(out)) == (1, "none")
    code, out, _ = run(capsys, "solve", "--concept", "scr", pent)
    assert code == 1
    big = reduce_to(capsys, tmp_path, "--theorem", "t1", "--family", "as", cnf, name="b.json")
    assert run(capsys, "solve", "--concept", "cr", big)[0] == 4


def test_solve_found(capsys, tmp_path):
    nine = reduce_to(capsys, tmp_path, "--cycle", "9", "--family", "as")
    code, out, _ = run(capsys, "solve", "--concept", "sis", nine)
    assert code == 0 and sorted(i for b in json.loads(out) for i in b) == list(range(9))


def test_verify_family(capsys):
    code, out, _ = run(capsys, "verify-family", "--family", "fhg", "--theorem", "t3", "--n", "7", "--seeds", "10")
    data = json.loads(out)
    assert code == 0 and data["holds"] and data["claimed"] and data["prng"] == "python-random/MT19937"
    code, out, _ = run(capsys, "verify-family", "--family", "sr", "--theorem", "t3", "--seeds", "10")
    assert code == 1 and not json.loads(out)["claimed"]
    code, _, _ = run(capsys, "verify-family", "--family", "socialfhg", "--theorem", "t1", "--seeds", "10")
    assert code == 0
    assert run(capsys, "verify-family", "--family", "as", "--theorem", "t1", "--n", "13")[0] == 2


def test_dynamics(capsys, tmp_path):
    nine = reduce_to(capsys, tmp_path, "--cycle", "9", "--family", "as")
    code, out, _ = run(capsys, "dynamics", "--concept", "ns", "--budget", "500", nine)
    assert code == 1 and json.loads(out)["status"] in ("cycle_detected", "budget_exhausted")

def test_dynamics_stable_start(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t2nb", "--family", "wbgame", cnf)
    part = write_partition(tmp_path, "t2nb")
    code, out, _ = run(capsys, "dynamics", "--concept", "is", "--start", part, game)
    data = json.loads(out)
    assert code == 0 and data["status"] == "stabilized" and data["steps"] == 0


def test_stats(capsys, tmp_path, cnf):
    game = reduce_to(capsys, tmp_path, "--theorem", "t2nb", "--family", "wbgame", cnf)
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "stats", "--emit-dot", dot, game)
    data = json.loads(out)
    assert code == 0 and data["n"] == 58 and data["theorem"] == "t2nb" and data["girth"] >= 8
    assert dot.exists()


def test_byte_identical_subprocess(tmp_path):
    def once():
        r = subprocess.run([sys.executable, "-m", "hedonica.cli", "--seed", "3", "verify-family",
                            "--family", "median", "--theorem", "t2b", "--seeds", "5"],
                           capture_output=True, env={"HEDONICA_THREADS": "2", "PATH": ""})
        return r.returncode, r.stdout
    a, b = once(), once()
    assert a == b and a[1]
    assert json.loads(a[1].decode("utf-8"))["seed"] == 3
