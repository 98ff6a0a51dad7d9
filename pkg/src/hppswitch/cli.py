"""
Command-line front end.

    hppswitch gen    --tree "pair(slot1:pair)" [--y 1,0 --seed 3 --gates-out g.json]
    hppswitch solve  --tree "pair(slot1:pair)" --gates paper --y 1,0 --solver all
    hppswitch sweep  --family balanced-pair --n-min 2 --n-max 12 --trials 1 --seed 0
    hppswitch census --tree "triple(slot0:triple)"

JSON and CSV go to stdout (or ``--out``); diagnostics go to stderr.
Exit codes: 2 promise violated, 3 unsatisfiable labels, 4 non-deterministic
measurement, 1 any other usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .causal import query_bound, recursive_solve, solve_one_control, solve_sim_switch, solve_two_control
from .errors import HPPError, NonDeterministicMeasurement, PromiseViolated
from .hadamard import SignMatrix
from .hpp import HPPInstance, build_from_tree, verify_promise
from .switch import switch_solve
from .synth import Unsatisfiable, example_gates, satisfiable_labels, synthesize_gates
from .tree import PAIR, TRIPLE, Node, balanced_pair_tree, chain_pair_tree, parse_tree, random_tree

EXIT_USAGE, EXIT_PROMISE, EXIT_UNSAT, EXIT_NONDET = 1, 2, 3, 4
HARD_MAX_N = 20
DEFAULT_MAX_N = 16
TOL_RANGE = (1e-12, 1e-6)
CENSUS_MAX_NX = 1024
DENSE_SIGNS_MAX_NX = 1024
SOLVERS = ("switch", "fig3", "fig4", "sim-n2", "recursive")
FAMILIES = ("balanced-pair", "chain-pair", "random")
CSV_COLUMNS = ("n", "solver", "mean_queries", "bound_2n_minus_1", "bound_n_squared",
               "bound_cnlogn", "success_rate")

_TWO_CONTROL_TREE = "pair(slot1:pair)"
_ONE_CONTROL_TREE = "triple"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 belongs to PromiseViolated
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _log(msg):
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(v: float) -> str:
    return "%.12g" % v


# ---- serialization -------------------------------------------------------

def instance_to_json(hpp: HPPInstance) -> dict:
    out = {
        "n": hpp.n,
        "n_x": hpp.n_x,
        "gate_dim": hpp.gate_dim,
        "perms": hpp.perms.tolist(),
        "label_shape": list(hpp.label_shape),
        "tree": hpp.tree.spec() if hpp.tree is not None else None,
        "sign_factors": hpp.signs.to_json(),
    }
    if hpp.n_x <= DENSE_SIGNS_MAX_NX:
        out["signs"] = hpp.signs.dense().tolist()
    return out


def instance_from_json(data: dict) -> HPPInstance:
    tree = parse_tree(data["tree"]) if data.get("tree") else None
    if "sign_factors" in data:
        signs = SignMatrix(tuple(np.array(f) for f in data["sign_factors"]))
    else:
        signs = SignMatrix.from_dense(np.array(data["signs"]))
    hpp = HPPInstance(np.array(data["perms"]), signs, tuple(data["label_shape"]),
                      int(data.get("gate_dim", 2)), tree)
    if tree is not None:
        ref = build_from_tree(tree)
        if not (np.array_equal(ref.perms, hpp.perms) and
                np.array_equal(ref.signs.dense(), hpp.signs.dense())):
            raise UsageError(f"instance data does not match its tree {data['tree']!r}")
        return ref
    return hpp


def gates_to_json(gates) -> dict:
    return {"gates": [[[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(g)]
                      for g in gates]}


def gates_from_json(data: dict) -> list:
    return [np.array([[complex(re, im) for re, im in row] for row in g]) for g in data["gates"]]


# ---- shared helpers ------------------------------------------------------

def _parse_labels(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v != "")
    except ValueError:
        raise UsageError(f"--y expects comma-separated integers, got {text!r}") from None


def _check_caps(args):
    if not 1 <= args.max_n <= HARD_MAX_N:
        raise UsageError(f"--max-n must lie in [1, {HARD_MAX_N}]")
    if not TOL_RANGE[0] <= args.tol <= TOL_RANGE[1]:
        raise UsageError(f"--tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")


def _tree_arg(text: str) -> Node:
    try:
        return parse_tree(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_instance(args) -> tuple:
    if args.instance:
        data = json.loads(Path(args.instance).read_text())
        hpp = instance_from_json(data)
        return hpp, args.instance
    if not args.tree:
        raise UsageError("give --tree or --instance")
    tree = _tree_arg(args.tree)
    return build_from_tree(tree), tree.spec()


def _resolve_gates(args, hpp: HPPInstance):
    src = args.gates
    if src in ("paper", "synth"):
        labels = _parse_labels(args.y)
        if labels is None:
            raise UsageError(f"--gates {src} needs --y")
        if hpp.tree is None:
            raise UsageError(f"--gates {src} needs an instance with a tree")
        if src == "paper":
            try:
                return example_gates(hpp.tree, labels), labels
            except KeyError as exc:
                raise UsageError(exc.args[0]) from None
        return synthesize_gates(hpp.tree, labels, seed=args.seed, tol=args.tol), labels
    path = Path(src)
    if not path.exists():
        raise UsageError(f"--gates must be 'paper', 'synth' or an existing JSON file, got {src!r}")
    return gates_from_json(json.loads(path.read_text())), _parse_labels(args.y)


def _solver_entry(y, ledger_dict, residual, bound, wall_ms) -> dict:
    return {"y": [int(v) for v in y], "queries": ledger_dict, "residual": float(residual),
            "bound": float(bound), "wall_ms": float(wall_ms)}


def _applicable(name: str, hpp: HPPInstance) -> bool:
    spec = hpp.tree.spec() if hpp.tree is not None else None
    if name == "fig3":
        return spec == _TWO_CONTROL_TREE
    if name == "fig4":
        return spec == _ONE_CONTROL_TREE
    if name == "recursive":
        return hpp.tree is not None
    return True


def run_solvers(hpp: HPPInstance, gates, names, tol: float, max_n: int, seed=None) -> dict:
    """Run each named solver; returns {name: (y, ledger dict, residual, bound, wall_ms, report)}."""
    out = {}
    for name in names:
        if name == "switch":
            r = switch_solve(hpp, gates, tol=tol, max_n=max_n)
            ledger = {str(g): 1 for g in range(hpp.n)}
            ledger["total"] = r.query_count
            out[name] = (r.recovered_y, ledger, r.residual, hpp.n, r.wall_ms, r)
            continue
        if name == "fig3":
            r = solve_two_control(gates, hpp, aux_seed=seed)
        elif name == "fig4":
            r = solve_one_control(gates, hpp, aux_seed=seed)
        elif name == "sim-n2":
            r = solve_sim_switch(hpp, gates, aux_seed=seed)
        elif name == "recursive":
            r = recursive_solve(hpp.tree, gates, aux_seed=seed)
        else:
            raise UsageError(f"unknown solver {name!r}")
        out[name] = (r.recovered_y, r.ledger.as_dict(), r.residual, r.bound_value, r.wall_ms, r)
    return out


def _solver_names(choice: str, hpp: HPPInstance) -> list:
    if choice == "all":
        return [s for s in SOLVERS if _applicable(s, hpp)]
    if not _applicable(choice, hpp):
        raise UsageError(f"solver {choice!r} does not apply to this instance")
    return [choice]


# ---- commands ------------------------------------------------------------

def cmd_gen(args) -> int:
    tree = _tree_arg(args.tree)
    hpp = build_from_tree(tree)
    if hpp.n > args.max_n:
        raise UsageError(f"tree has n={hpp.n} gates, above --max-n {args.max_n}")
    if args.gates_out:
        labels = _parse_labels(args.y)
        if labels is None:
            raise UsageError("--gates-out needs --y")
        gates = synthesize_gates(tree, labels, seed=args.seed, tol=args.tol)
        if isinstance(gates, Unsatisfiable):
            _log(f"unsatisfiable: {gates}")
            return EXIT_UNSAT
        Path(args.gates_out).write_text(dump_json(gates_to_json(gates)))
    _emit(dump_json(instance_to_json(hpp)), args.out)
    return 0


def cmd_solve(args) -> int:
    hpp, ref = _load_instance(args)
    if hpp.n > args.max_n:
        raise UsageError(f"instance has n={hpp.n} gates, above --max-n {args.max_n}")
    gates, _labels = _resolve_gates(args, hpp)
    if isinstance(gates, Unsatisfiable):
        _log(f"unsatisfiable: {gates}")
        return EXIT_UNSAT
    promise_y = verify_promise(hpp, gates, tol=args.tol)
    names = _solver_names(args.solver, hpp)
    results = run_solvers(hpp, gates, names, args.tol, args.max_n, seed=args.seed)
    solvers = {name: _solver_entry(*res[:5]) for name, res in results.items()}
    for name, entry in solvers.items():
        if tuple(entry["y"]) != tuple(promise_y):
            _log(f"warning: {name} returned {entry['y']} but the promise label is {list(promise_y)}")
    report = {"instance_ref": ref, "promise_y": [int(v) for v in promise_y], "solvers": solvers}
    if args.dump_circuit:
        circuits = {name: res[5].circuit.to_json() for name, res in results.items()
                    if getattr(res[5], "circuit", None) is not None}
        Path(args.dump_circuit).write_text(dump_json(circuits))
    _emit(dump_json(report), args.out)
    return 0


def family_tree(family: str, n: int, rng) -> Node:
    if family == "balanced-pair":
        return balanced_pair_tree(n)
    if family == "chain-pair":
        return chain_pair_tree(n)
    if family == "random":
        return random_tree(n, rng, (PAIR, TRIPLE))
    raise UsageError(f"unknown family {family!r}")


def random_satisfiable(tree: Node, rng, max_tries: int = 256):
    """Draw labels uniformly until synthesis succeeds; returns (labels, gates)."""
    hpp = build_from_tree(tree)
    for _ in range(max_tries):
        labels = hpp.decode(int(rng.integers(hpp.n_x)))
        gates = synthesize_gates(tree, labels, seed=int(rng.integers(2 ** 31)))
        if not isinstance(gates, Unsatisfiable):
            return labels, gates
    raise UsageError(f"no satisfiable labels found for {tree.spec()} after {max_tries} draws")


def sweep_rows(family: str, n_min: int, n_max: int, trials: int, seed: int, solver: str = "all",
               tol: float = 1e-9, max_n: int = DEFAULT_MAX_N) -> list:
    rng = np.random.default_rng(seed)
    rows = []
    for n in range(n_min, n_max + 1):
        cells = {}
        for _ in range(trials):
            tree = family_tree(family, n, rng)
            hpp = build_from_tree(tree)
            labels, gates = random_satisfiable(tree, rng)
            names = [s for s in SOLVERS if _applicable(s, hpp)] if solver == "all" else [solver]
            for name in names:
                if not _applicable(name, hpp):
                    continue
                try:
                    res = run_solvers(hpp, gates, [name], tol, max_n, seed=int(rng.integers(2 ** 31)))[name]
                    ok = tuple(res[0]) == tuple(labels)
                    q = res[1]["total"]
                except NonDeterministicMeasurement:
                    ok, q = False, math.nan
                cells.setdefault(name, []).append((q, ok, query_bound(tree)))
        for name in SOLVERS:
            if name not in cells:
                continue
            qs, oks, bounds = zip(*cells[name])
            rows.append({
                "n": n,
                "solver": name,
                "mean_queries": float(np.mean(qs)),
                "bound_2n_minus_1": 2 * n - 1,
                "bound_n_squared": n * n,
                "bound_cnlogn": float(np.mean(bounds)),
                "success_rate": float(np.mean(oks)),
            })
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) if isinstance(r[c], float) else r[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    if args.n_max > args.max_n:
        raise UsageError(f"--n-max {args.n_max} is above --max-n {args.max_n}")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    if args.solver != "all" and args.solver not in SOLVERS:
        raise UsageError(f"unknown solver {args.solver!r}")
    rows = sweep_rows(args.family, args.n_min, args.n_max, args.trials, args.seed or 0,
                      args.solver, args.tol, args.max_n)
    _emit(rows_to_csv(rows), args.out)
    failed = [r for r in rows if r["success_rate"] < 1.0]
    for r in failed:
        _log(f"solver {r['solver']} failed at n={r['n']} (success rate {r['success_rate']:.3g})")
    return EXIT_NONDET if failed else 0


def census(tree: Node) -> dict:
    hpp = build_from_tree(tree)
    if hpp.n_x > CENSUS_MAX_NX:
        raise UsageError(f"census needs n_x <= {CENSUS_MAX_NX}, tree has n_x = {hpp.n_x}")
    ok, bad = satisfiable_labels(tree)
    return {
        "tree": tree.spec(),
        "n": hpp.n,
        "n_x": hpp.n_x,
        "label_shape": list(hpp.label_shape),
        "satisfiable": [list(y) for y in ok],
        "unsatisfiable": [{"y": list(u.labels), "path": u.path, "reason": u.reason} for u in bad],
        "all_satisfiable": not bad,
    }


def cmd_census(args) -> int:
    tree = _tree_arg(args.tree)
    if tree.n_leaves > args.max_n:
        raise UsageError(f"tree has n={tree.n_leaves} gates, above --max-n {args.max_n}")
    _emit(dump_json(census(tree)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--max-n", type=int, default=DEFAULT_MAX_N, help="gate-count cap (<= 20)")
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance in [1e-12, 1e-6]")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    p = _Parser(prog="hppswitch", description="Hadamard promise problems: switch vs causal solvers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="write an instance JSON for a tree")
    g.add_argument("--tree", required=True)
    g.add_argument("--y", default=None, help="labels for --gates-out, e.g. 1,0")
    g.add_argument("--gates-out", default=None, help="also synthesize gates for --y into this file")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", parents=[common], help="solve an instance with one or all solvers")
    s.add_argument("--tree", default=None)
    s.add_argument("--instance", default=None, help="instance JSON written by gen")
    s.add_argument("--gates", default="synth", help="paper | synth | path to gates JSON")
    s.add_argument("--y", default=None)
    s.add_argument("--solver", default="all", choices=("all",) + SOLVERS)
    s.add_argument("--dump-circuit", default=None, help="write causal circuit JSON here")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", parents=[common], help="query counts per solver as CSV")
    w.add_argument("--family", default="balanced-pair", choices=FAMILIES)
    w.add_argument("--n-min", type=int, default=2)
    w.add_argument("--n-max", type=int, default=12)
    w.add_argument("--trials", type=int, default=1)
    w.add_argument("--solver", default="all", choices=("all",) + SOLVERS)
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("census", parents=[common], help="satisfiability of every label of a tree")
    c.add_argument("--tree", required=True)
    c.set_defaults(func=cmd_census)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _check_caps(args)
        return args.func(args)
    except PromiseViolated as exc:
        _log(f"promise violated: {exc}")
        return EXIT_PROMISE
    except NonDeterministicMeasurement as exc:
        _log(f"non-deterministic measurement: {exc}")
        return EXIT_NONDET
    except (UsageError, HPPError, ValueError, OSError, json.JSONDecodeError) as exc:
        _log(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
