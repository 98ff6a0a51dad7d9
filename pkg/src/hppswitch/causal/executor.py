"""
Exact executor for :class:`CausalCircuit` with a black-box query ledger.

Two state representations are available:

``branch``
    For every basis value of the control registers, keep an amplitude and a
    product state of all wires.  Swaps and single-wire gates preserve this
    form, so it is exact for every circuit the IR can express, as long as a
    Hadamard transform is only applied to a control register whose branches
    carry equal wire states (up to phase).  That holds for all solvers here
    under a valid promise.  Memory is linear in the number of wires.

``dense``
    The full tensor over all registers.  Exponential in the wire count; used
    as a reference and as a fallback when branches diverge.

``auto`` (default) runs ``branch`` and switches to ``dense`` on divergence if
the full tensor fits, otherwise reports the measurement as non-deterministic.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonDeterministicMeasurement
from ..hadamard import apply_hadamard
from ..hpp import as_gate_stack
from ..qmat import TOL
from .ir import WIRE, BlackBox, CausalCircuit, CSwap, Hadamard, Measure

MEASURE_THRESHOLD = 1 - 1e-6
DENSE_LIMIT = 1 << 22
_LIVE = 1e-14
# wire states count as equal when |<ref|v>| >= 1 - _PARALLEL
_PARALLEL = 1e-12


class QueryLedger:
    """Per-gate black-box call counts."""

    def __init__(self, counts=None):
        self.counts = Counter(counts or {})

    def record(self, gate: int, times: int = 1):
        self.counts[int(gate)] += times

    def merge(self, other: "QueryLedger"):
        self.counts.update(other.counts)
        return self

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> dict:
        out = {str(g): int(c) for g, c in sorted(self.counts.items())}
        out["total"] = self.total
        return out

    def __eq__(self, other):
        if isinstance(other, QueryLedger):
            return +self.counts == +other.counts
        if isinstance(other, dict):
            # accepts the as_dict() form: gate keys as int or str, optional "total"
            other = dict(other)
            total = other.pop("total", self.total)
            gates = Counter({int(g): c for g, c in other.items()})
            return total == self.total and +self.counts == +gates
        return NotImplemented

    def __repr__(self):
        return f"QueryLedger({dict(sorted(self.counts.items()))}, total={self.total})"


class _Divergent(Exception):
    pass


def _normalized(vec, dim, name):
    if isinstance(vec, (int, np.integer)):
        if not 0 <= vec < dim:
            raise ValueError(f"basis index {vec} out of range for {name!r}")
        v = np.zeros(dim, dtype=complex)
        v[vec] = 1
        return v
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if v.size != dim:
        raise ValueError(f"initial state for {name!r} has length {v.size}, register dim is {dim}")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1) > 1e-9:
        raise ValueError(f"initial state for {name!r} is not normalized")
    return v


def _initial_vectors(circuit, initial):
    initial = dict(initial or {})
    unknown = set(initial) - {r.name for r in circuit.registers}
    if unknown:
        raise ValueError(f"initial states given for undeclared registers {sorted(unknown)}")
    vecs = {}
    for r in circuit.registers:
        if r.name in initial:
            vecs[r.name] = _normalized(initial[r.name], r.dim, r.name)
        else:
            v = np.zeros(r.dim, dtype=complex)
            v[0] = 1
            vecs[r.name] = v
    return vecs


class BranchState:
    def __init__(self, circuit: CausalCircuit, vecs: dict):
        self.ctrl = [r.name for r in circuit.controls]
        self.ctrl_dims = tuple(r.dim for r in circuit.controls)
        self.wires = [r.name for r in circuit.wires]
        self.widx = {w: i for i, w in enumerate(self.wires)}
        dims = {r.dim for r in circuit.wires}
        if len(dims) > 1:
            raise ValueError("branch backend needs all wires of one dimension")
        self.d = dims.pop() if dims else 1
        c = np.ones((), dtype=complex)
        for name in self.ctrl:
            c = np.multiply.outer(c, vecs[name])
        self.c = c
        wires = np.stack([vecs[w] for w in self.wires]) if self.wires else np.zeros((0, self.d), complex)
        self.D = np.broadcast_to(wires, self.ctrl_dims + wires.shape).copy()
        self._order = [r.name for r in circuit.registers]

    def _axis(self, reg):
        return self.ctrl.index(reg)

    def _mask(self, reg, values):
        ax = self._axis(reg)
        m = np.zeros(self.ctrl_dims[ax], dtype=bool)
        m[list(values)] = True
        shape = [1] * len(self.ctrl_dims)
        shape[ax] = -1
        return m.reshape(shape)

    def hadamard(self, reg, signs, inverse, tol):
        ax = self._axis(reg)
        if self.wires:
            mag = np.abs(self.c)
            ref_idx = np.expand_dims(np.argmax(mag, axis=ax), ax)
            ref = np.take_along_axis(self.D, ref_idx[..., None, None], axis=ax)
            ov = np.sum(ref.conj() * self.D, axis=-1)
            live = mag > _LIVE
            if np.any(live[..., None] & (np.abs(ov) < 1 - _PARALLEL)):
                raise _Divergent(reg)
            phase = np.where(live, np.prod(ov / np.where(np.abs(ov) > 0, np.abs(ov), 1), axis=-1), 1)
            self.c = self.c * phase
            self.D = np.broadcast_to(ref, self.D.shape).copy()
        moved = np.moveaxis(self.c, ax, 0)
        out = apply_hadamard(signs, moved.reshape(moved.shape[0], -1), inverse=inverse)
        self.c = np.moveaxis(out.reshape(moved.shape), 0, ax)

    def cswap(self, control, values, a, b):
        sel = self._mask(control, values)[..., None]
        ia, ib = self.widx[a], self.widx[b]
        da, db = self.D[..., ia, :].copy(), self.D[..., ib, :].copy()
        self.D[..., ia, :] = np.where(sel, db, da)
        self.D[..., ib, :] = np.where(sel, da, db)

    def blackbox(self, u, wire):
        i = self.widx[wire]
        self.D[..., i, :] = self.D[..., i, :] @ u.T

    def outcome_probs(self, reg):
        ax = self._axis(reg)
        p = np.abs(self.c) ** 2
        return np.sum(p, axis=tuple(i for i in range(p.ndim) if i != ax))

    def collapse(self, reg, value):
        keep = self._mask(reg, [value])
        self.c = np.where(keep, self.c, 0)
        self.c /= np.linalg.norm(self.c)

    def wire_fidelity(self, wire, vec) -> float:
        ov = np.abs(self.D[..., self.widx[wire], :] @ np.conj(vec)) ** 2
        return float(np.sum(np.abs(self.c) ** 2 * ov))

    def to_dense(self) -> "DenseState":
        total = int(np.prod(self.ctrl_dims, dtype=np.int64)) * self.d ** len(self.wires)
        if total > DENSE_LIMIT:
            raise MemoryError(f"dense state of {total} amplitudes exceeds limit {DENSE_LIMIT}")
        t = self.c
        for i in range(len(self.wires)):
            # outer product branch-wise with wire i
            t = t[..., None] * self.D[..., i, :].reshape(self.ctrl_dims + (1,) * i + (self.d,))
        # axes: ctrl..., wires...  -> reorder to circuit register order
        names = self.ctrl + self.wires
        perm = [names.index(n) for n in self._order]
        return DenseState(np.transpose(t, perm), self._order)


class DenseState:
    def __init__(self, tensor, names):
        self.t = np.asarray(tensor, dtype=complex)
        self.names = list(names)

    @classmethod
    def from_vectors(cls, circuit, vecs):
        t = np.ones((), dtype=complex)
        for r in circuit.registers:
            t = np.multiply.outer(t, vecs[r.name])
        return cls(t, [r.name for r in circuit.registers])

    def _ax(self, reg):
        return self.names.index(reg)

    def hadamard(self, reg, signs, inverse, tol):
        ax = self._ax(reg)
        moved = np.moveaxis(self.t, ax, 0)
        out = apply_hadamard(signs, moved.reshape(moved.shape[0], -1), inverse=inverse)
        self.t = np.moveaxis(out.reshape(moved.shape), 0, ax)

    def cswap(self, control, values, a, b):
        ax = self._ax(control)
        m = np.zeros(self.t.shape[ax], dtype=bool)
        m[list(values)] = True
        shape = [1] * self.t.ndim
        shape[ax] = -1
        swapped = np.swapaxes(self.t, self._ax(a), self._ax(b))
        self.t = np.where(m.reshape(shape), swapped, self.t)

    def blackbox(self, u, wire):
        ax = self._ax(wire)
        self.t = np.moveaxis(np.tensordot(u, self.t, axes=([1], [ax])), 0, ax)

    def outcome_probs(self, reg):
        ax = self._ax(reg)
        p = np.abs(self.t) ** 2
        return np.sum(p, axis=tuple(i for i in range(p.ndim) if i != ax))

    def collapse(self, reg, value):
        ax = self._ax(reg)
        m = np.zeros(self.t.shape[ax], dtype=bool)
        m[value] = True
        shape = [1] * self.t.ndim
        shape[ax] = -1
        self.t = np.where(m.reshape(shape), self.t, 0)
        self.t /= np.linalg.norm(self.t)

    def reduced(self, reg) -> np.ndarray:
        a = np.moveaxis(self.t, self._ax(reg), 0)
        a = a.reshape(a.shape[0], -1)
        return a @ a.conj().T

    def wire_fidelity(self, wire, vec) -> float:
        v = np.asarray(vec, dtype=complex)
        return float(np.real(v.conj() @ self.reduced(wire) @ v))

    def to_dense(self):
        return self


@dataclass
class RunResult:
    outcomes: dict
    ledger: QueryLedger
    state: object
    deviation: float = 0.0  # max over measurements of 1 - p(outcome)
    backend: str = "branch"
    measured: list = field(default_factory=list)


def run_circuit(circuit: CausalCircuit, gates, initial=None, backend: str = "auto",
                tol: float = TOL) -> RunResult:
    """Execute ``circuit`` with black-box ``gates`` (indexable by gate number).

    ``initial`` maps register names to state vectors (or basis indices);
    unspecified registers start in |0>.  Every BLACKBOX instruction is charged to
    the ledger once, independent of the control state.
    """
    if backend not in ("auto", "branch", "dense"):
        raise ValueError(f"unknown backend {backend!r}")
    needed = circuit.blackbox_counts()
    g = as_gate_stack(gates, tol=tol) if len(gates) else np.zeros((0, 2, 2), complex)
    if needed and max(needed) >= len(g):
        raise ValueError(f"circuit calls gate {max(needed)} but only {len(g)} gates were given")
    wire_dims = {r.dim for r in circuit.registers if r.kind == WIRE}
    if wire_dims - {g.shape[1]} and needed:
        raise ValueError(f"wire dims {sorted(wire_dims)} do not match gate dim {g.shape[1]}")

    vecs = _initial_vectors(circuit, initial)
    if backend == "dense":
        state = DenseState.from_vectors(circuit, vecs)
    else:
        state = BranchState(circuit, vecs)
    used = "dense" if backend == "dense" else "branch"
    ledger = QueryLedger()
    outcomes, deviation, measured = {}, 0.0, []

    for ins in circuit.instructions:
        if isinstance(ins, Hadamard):
            try:
                state.hadamard(ins.reg, ins.signs, ins.inverse, tol)
            except _Divergent:
                if backend == "branch":
                    raise NonDeterministicMeasurement(
                        f"wire states diverge across values of {ins.reg!r}; "
                        "the control would stay entangled (promise violated?)") from None
                try:
                    state = state.to_dense()
                except MemoryError:
                    raise NonDeterministicMeasurement(
                        f"wire states diverge across values of {ins.reg!r} and the dense "
                        "fallback is too large; promise violated?") from None
                used = "dense"
                state.hadamard(ins.reg, ins.signs, ins.inverse, tol)
        elif isinstance(ins, CSwap):
            state.cswap(ins.control, ins.values, ins.a, ins.b)
        elif isinstance(ins, BlackBox):
            state.blackbox(g[ins.gate], ins.wire)
            ledger.record(ins.gate)
        elif isinstance(ins, Measure):
            p = state.outcome_probs(ins.reg)
            v = int(np.argmax(p))
            if p[v] < MEASURE_THRESHOLD:
                raise NonDeterministicMeasurement(
                    f"register {ins.reg!r}: largest outcome probability {p[v]:.6g}")
            state.collapse(ins.reg, v)
            outcomes[ins.reg] = v
            measured.append(ins.reg)
            deviation = max(deviation, float(1 - p[v]))
        else:
            raise TypeError(f"unknown instruction {ins!r}")
    return RunResult(outcomes, ledger, state, deviation, used, measured)
