"""
Causal (fixed-order) solvers returning :class:`CausalReport` records.

``recursive_solve`` follows the divide-and-conquer construction: every child
block of the root fundamental problem is solved on its own, and the root label
is read from a simulation of all block orders.  That simulation routes around
the largest block j: the blocks placed before j are applied in at most k-1
swap steps, then block j's own solver runs on the target (this also
applies its reference product), then at most k-1 steps for the blocks after
j.  Each non-j block is therefore called 2(k-1) times at the root.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..hpp import HPPInstance, build_from_tree, fundamental_hpp
from ..qmat import random_state
from ..tree import Node
from .builders import (
    build_one_control_circuit,
    build_sim_switch_circuit,
    build_two_control_circuit,
    emit_sim_switch,
)
from .executor import QueryLedger, RunResult, run_circuit
from .ir import CausalCircuit


@dataclass
class CausalReport:
    recovered_y: tuple
    ledger: QueryLedger
    residual: float
    bound_value: float
    wall_ms: float = 0.0
    circuit: CausalCircuit | None = field(default=None, repr=False)
    run: RunResult | None = field(default=None, repr=False)
    initial: dict = field(default_factory=dict, repr=False)
    extra: dict = field(default_factory=dict, repr=False)


def query_bound(tree: Node) -> float:
    """C n log2(n) with C = 2 (k_max - 1); 0 for a single gate."""
    n = tree.n_leaves
    if n <= 1:
        return 0.0
    return 2 * (tree.k_max - 1) * n * math.log2(n)


def _initial(circuit, target_init, aux_seed):
    init = {}
    if target_init is not None:
        init["t"] = target_init
    if aux_seed is not None:
        rng = np.random.default_rng(aux_seed)
        for r in circuit.wires:
            if r.name != "t":
                init[r.name] = random_state(r.dim, rng)
    return init


def _run(circuit, gates, target_init, aux_seed, backend):
    init = _initial(circuit, target_init, aux_seed)
    return run_circuit(circuit, gates, init, backend=backend), init


_TWO_CONTROL_PERMS = np.array([[0, 1, 2], [1, 2, 0], [0, 2, 1], [2, 1, 0]])
_ONE_CONTROL_PERMS = np.array([[0, 1, 2], [2, 1, 0]])


def solve_two_control(gates, hpp: HPPInstance | None = None, target_init=None, aux_seed=None,
               backend="auto") -> CausalReport:
    if hpp is not None and not np.array_equal(hpp.perms, _TWO_CONTROL_PERMS):
        raise ValueError("the five-query two-control circuit only solves pair(slot1:pair)")
    t0 = time.perf_counter()
    circ = build_two_control_circuit()
    res, init = _run(circ, gates, target_init, aux_seed, backend)
    y = (res.outcomes["c1"], res.outcomes["c2"])
    return CausalReport(y, res.ledger, res.deviation, 2 * 3 - 1,
                        (time.perf_counter() - t0) * 1e3, circ, res, init)


def solve_one_control(gates, hpp: HPPInstance | None = None, target_init=None, aux_seed=None,
               backend="auto") -> CausalReport:
    if hpp is not None and not np.array_equal(hpp.perms, _ONE_CONTROL_PERMS):
        raise ValueError("the five-query one-control circuit only solves the triple problem")
    t0 = time.perf_counter()
    circ = build_one_control_circuit()
    res, init = _run(circ, gates, target_init, aux_seed, backend)
    return CausalReport((res.outcomes["c"],), res.ledger, res.deviation, 2 * 3 - 1,
                        (time.perf_counter() - t0) * 1e3, circ, res, init)


solve_fig3 = solve_two_control
solve_fig4 = solve_one_control


def solve_sim_switch(hpp: HPPInstance, gates, target_init=None, aux_seed=None,
                     backend="auto") -> CausalReport:
    t0 = time.perf_counter()
    circ = build_sim_switch_circuit(hpp)
    res, init = _run(circ, gates, target_init, aux_seed, backend)
    return CausalReport(hpp.decode(res.outcomes["c"]), res.ledger, res.deviation, hpp.n ** 2,
                        (time.perf_counter() - t0) * 1e3, circ, res, init)


def block_sequence(node: Node | None, offset: int) -> list:
    """Global gate indices of a block's reference product, in application order."""
    if node is None:
        return [offset]
    return [offset + int(g) for g in build_from_tree(node).perms[0]]


def choose_j(node: Node) -> int:
    sizes = [node.block_size(s) for s in range(node.k)]
    return sizes.index(max(sizes))


class _Recursion:
    def __init__(self, gates, backend):
        self.gates = gates
        self.backend = backend
        self.ledger = QueryLedger()
        self.deviation = 0.0
        self.runs = 0

    def solve_block(self, node, offset, target_init=None, aux_seed=None):
        """Full, separate solve of one block; returns (labels, circuit, run, initial, info)."""
        circ = CausalCircuit()
        circ.add_wire("t")
        info = {}
        sources = self.emit(node, offset, circ, "t", "r", info)
        init = _initial(circ, target_init, aux_seed)
        res = run_circuit(circ, self.gates, init, backend=self.backend)
        self.ledger.merge(res.ledger)
        self.deviation = max(self.deviation, res.deviation)
        self.runs += 1
        labels = [res.outcomes[s] if isinstance(s, str) else s for s in sources]
        return labels, circ, res, init, info

    def emit(self, node, offset, circ, target, path, info) -> list:
        """Append the solver for ``node`` acting on ``target``; return label sources."""
        control = f"c[{path}]"
        fund = fundamental_hpp(node)
        if node.is_fundamental:
            emit_sim_switch(circ, fund, target, control,
                            aux_names=[f"a{offset + g}[{path}]" for g in range(node.k)],
                            gate_ids=[offset + g for g in range(node.k)])
            return [control]

        k = node.k
        offs = [offset + o for o in node.block_offsets()]
        j = choose_j(node)
        known = {}
        for s, child in node.children:
            if s != j:
                known[s] = self.solve_block(child, offs[s])[0]

        others = [s for s in range(k) if s != j]
        aux = {s: f"blk{s}[{path}]" for s in others}
        seqs = {s: block_sequence(node.child(s), offs[s]) for s in range(k)}
        circ.add_control(control, fund.n_x)
        for s in others:
            circ.add_wire(aux[s])
        if path == "r":
            info.update(j=j, k=k, aux=aux, seqs=seqs)

        perms = fund.perms
        pos_j = [int(np.flatnonzero(p == j)[0]) for p in perms]

        def step(slot_of):
            swaps = []
            for s in others:
                xs = [x for x in range(fund.n_x) if slot_of(x) == s]
                swaps.append((aux[s], xs))
            for a, xs in swaps:
                circ.cswap(control, xs, target, a)
            for s in others:
                for g in seqs[s]:
                    circ.blackbox(g, aux[s])
            for a, xs in swaps:
                circ.cswap(control, xs, target, a)

        circ.hadamard(control, fund.signs)
        for i in range(k - 1):
            step(lambda x, i=i: int(perms[x][i]) if i < pos_j[x] else None)
        child_j = node.child(j)
        if child_j is None:
            circ.blackbox(offs[j], target)
            labels_j = []
        else:
            labels_j = self.emit(child_j, offs[j], circ, target, f"{path}.s{j}", info)
        for i in range(k - 1):
            step(lambda x, i=i: int(perms[x][pos_j[x] + 1 + i]) if pos_j[x] + 1 + i < k else None)
        circ.inv_hadamard(control, fund.signs)
        circ.measure(control)

        out = [control]
        for s, _child in node.children:
            out.extend(labels_j if s == j else known[s])
        return out


def recursive_solve(tree: Node, gates, target_init=None, aux_seed=None, backend="auto") -> CausalReport:
    """Causal solver with at most 2(k_max-1) n log2(n) black-box calls."""
    t0 = time.perf_counter()
    rec = _Recursion(gates, backend)
    labels, circ, res, init, info = rec.solve_block(tree, 0, target_init, aux_seed)
    info["runs"] = rec.runs
    return CausalReport(tuple(labels), rec.ledger, rec.deviation, query_bound(tree),
                        (time.perf_counter() - t0) * 1e3, circ, res, init, info)
