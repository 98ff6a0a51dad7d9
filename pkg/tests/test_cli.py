import csv
import io
import json

import numpy as np
import pytest

from hppswitch.cli import (
    CSV_COLUMNS,
    dump_json,
    gates_to_json,
    instance_from_json,
    instance_to_json,
    main,
)
from hppswitch.hpp import build_from_tree
from hppswitch.qmat import pauli
from hppswitch.tree import balanced_pair_tree, parse_tree

X, Y, Z, I = (pauli(p) for p in "XYZI")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_fundamental_instances(capsys):
    code, out, _ = run(capsys, "gen", "--tree", "pair(slot1:pair)")
    assert code == 0
    d = json.loads(out)
    assert d["perms"] == [[0, 1, 2], [1, 2, 0], [0, 2, 1], [2, 1, 0]]
    assert d["signs"] == [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]
    assert d["label_shape"] == [2, 2] and d["n"] == 3 and d["n_x"] == 4
    assert d["tree"] == "pair(slot1:pair)"
    assert json.loads(run(capsys, "gen", "--tree", "pair")[1])["perms"] == [[0, 1], [1, 0]]
    assert json.loads(run(capsys, "gen", "--tree", "triple")[1])["perms"] == [[0, 1, 2], [2, 1, 0]]


def test_instance_json_round_trip():
    for spec in ("pair", "triple(slot0:pair)", "twoperm(4)"):
        h = build_from_tree(parse_tree(spec))
        back = instance_from_json(json.loads(dump_json(instance_to_json(h))))
        assert np.array_equal(back.perms, h.perms)
        assert np.array_equal(back.signs.dense(), h.signs.dense())
    big = build_from_tree(balanced_pair_tree(12))
    d = instance_to_json(big)
    assert "signs" not in d and len(d["sign_factors"]) == 11


def test_instance_without_tree(tmp_path, capsys):
    d = instance_to_json(build_from_tree(parse_tree("pair")))
    d["tree"] = None
    del d["sign_factors"]
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(d))
    g = tmp_path / "g.json"
    g.write_text(json.dumps(gates_to_json([Y, X])))
    code, out, _ = run(capsys, "solve", "--instance", str(path), "--gates", str(g))
    assert code == 0
    assert set(json.loads(out)["solvers"]) == {"switch", "sim-n2"}


def test_tampered_instance_rejected(tmp_path, capsys):
    d = instance_to_json(build_from_tree(parse_tree("pair(slot1:pair)")))
    d["perms"][1], d["perms"][2] = d["perms"][2], d["perms"][1]
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(d))
    code, _, err = run(capsys, "solve", "--instance", str(path), "--gates", "paper", "--y", "0,0")
    assert code == 1 and "does not match" in err


def test_solve_all_three_gate(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    assert main(["gen", "--tree", "pair(slot1:pair)", "--out", str(inst)]) == 0
    circ = tmp_path / "circ.json"
    code, out, _ = run(capsys, "solve", "--instance", str(inst), "--gates", "paper", "--y", "1,0",
                       "--solver", "all", "--dump-circuit", str(circ))
    assert code == 0
    rep = json.loads(out)
    assert rep["instance_ref"] == str(inst)
    sol = rep["solvers"]
    assert set(sol) == {"switch", "fig3", "sim-n2", "recursive"}
    assert all(v["y"] == [1, 0] for v in sol.values())
    assert sol["switch"]["queries"]["total"] == 3
    assert sol["fig3"]["queries"] == {"0": 2, "1": 2, "2": 1, "total": 5}
    assert sol["sim-n2"]["queries"]["total"] == 9
    assert sol["recursive"]["queries"]["total"] <= 9
    assert sol["fig3"]["bound"] == 5 and sol["sim-n2"]["bound"] == 9
    dumped = json.loads(circ.read_text())
    assert set(dumped) == {"fig3", "sim-n2", "recursive"}
    # report round-trips byte-identically
    assert dump_json(json.loads(out)) == out


def test_solve_pair_example_gates(capsys):
    code, out, _ = run(capsys, "solve", "--tree", "pair", "--gates", "paper", "--y", "1", "--solver", "switch")
    assert code == 0
    sol = json.loads(out)["solvers"]
    assert sol["switch"]["y"] == [1] and sol["switch"]["queries"]["total"] == 2


def test_solve_gates_file(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(gates_to_json([Y, X])))
    code, out, _ = run(capsys, "solve", "--tree", "pair", "--gates", str(path), "--solver", "switch")
    assert code == 0
    assert json.loads(out)["solvers"]["switch"]["y"] == [1]


def test_promise_violation_exit_code(tmp_path, capsys):
    hgate = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(gates_to_json([X, hgate])))
    code, out, err = run(capsys, "solve", "--tree", "pair", "--gates", str(path))
    assert code == 2 and out == "" and "promise" in err


def test_unsatisfiable_exit_code(capsys):
    code, out, err = run(capsys, "solve", "--tree", "pair(slot1:pair(slot1:pair))",
                         "--gates", "synth", "--y", "0,0,1", "--seed", "1")
    assert code == 3 and out == "" and "root.slot1.slot1" in err


def test_nondeterministic_exit_code(tmp_path, capsys, monkeypatch):
    # slightly broken promise: rejected up front, and ambiguous if the check is skipped
    eps = 3e-3
    tilt = np.diag([np.exp(-1j * eps), np.exp(1j * eps)])
    path = tmp_path / "g.json"
    path.write_text(json.dumps(gates_to_json([Y, X @ tilt])))
    code, _, err = run(capsys, "solve", "--tree", "pair", "--gates", str(path), "--tol", "1e-6")
    assert code == 2  # rejected up front at this tolerance
    import hppswitch.cli as cli
    monkeypatch.setattr(cli, "verify_promise", lambda *a, **k: (1,))
    code, _, err = run(capsys, "solve", "--tree", "pair", "--gates", str(path), "--solver", "switch")
    assert code == 4 and "non-deterministic" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--tree", "pair", "--tol", "1e-3", "--gates", "synth", "--y", "1"],
    ["solve", "--tree", "pair", "--max-n", "21", "--gates", "synth", "--y", "1"],
    ["solve", "--tree", "pear", "--gates", "synth", "--y", "1"],
    ["solve", "--tree", "pair", "--gates", "synth"],
    ["solve", "--tree", "pair", "--gates", "missing.json"],
    ["solve", "--tree", "triple", "--gates", "synth", "--y", "1", "--solver", "fig3"],
    ["gen", "--tree", "twoperm(18)"],
    ["sweep", "--n-min", "5", "--n-max", "3"],
    ["census", "--tree", "pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair(slot0:pair))))))))))"],
    ["bogus"],
])
def test_usage_errors_exit_one(capsys, argv):
    code = None
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, _ = capsys.readouterr()
    assert code == 1 and out == ""


def test_gen_gates_out(tmp_path, capsys):
    g = tmp_path / "g.json"
    code, _, _ = run(capsys, "gen", "--tree", "triple(slot1:pair)", "--y", "1,1", "--seed", "4",
                     "--gates-out", str(g))
    assert code == 0
    code, out, _ = run(capsys, "solve", "--tree", "triple(slot1:pair)", "--gates", str(g))
    assert code == 0
    assert {tuple(v["y"]) for v in json.loads(out)["solvers"].values()} == {(1, 1)}


def test_sweep_csv(capsys):
    code, out, err = run(capsys, "sweep", "--family", "balanced-pair", "--n-min", "2", "--n-max", "9",
                         "--seed", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    for r in rows:
        n = int(r["n"])
        assert float(r["success_rate"]) == 1.0
        assert int(r["bound_2n_minus_1"]) == 2 * n - 1 and int(r["bound_n_squared"]) == n * n
        if r["solver"] == "switch":
            assert float(r["mean_queries"]) == n
        if r["solver"] == "recursive":
            assert float(r["mean_queries"]) <= 2 * n * np.log2(n)
    fig3 = [r for r in rows if r["solver"] == "fig3"]
    assert len(fig3) == 1 and fig3[0]["n"] == "3" and float(fig3[0]["mean_queries"]) == 5
    # 12 significant digits
    assert any(r["bound_cnlogn"] == "9.50977500433" for r in rows)


def test_sweep_random_family(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "random", "--n-min", "3", "--n-max", "6",
                       "--trials", "3", "--seed", "1", "--solver", "recursive")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["solver"] for r in rows] == ["recursive"] * 4
    assert all(float(r["success_rate"]) == 1.0 for r in rows)


def test_census(capsys):
    code, out, _ = run(capsys, "census", "--tree", "pair(slot1:pair)")
    d = json.loads(out)
    assert code == 0 and d["all_satisfiable"] and len(d["satisfiable"]) == 4
    d = json.loads(run(capsys, "census", "--tree", "pair")[1])
    assert d["satisfiable"] == [[0], [1]]
    d = json.loads(run(capsys, "census", "--tree", "pair(slot1:pair(slot1:pair))")[1])
    assert not d["all_satisfiable"]
    assert sorted(u["y"] for u in d["unsatisfiable"]) == [[0, 0, 1], [1, 0, 1]]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "hppswitch", "census", "--tree", "triple"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["all_satisfiable"]
