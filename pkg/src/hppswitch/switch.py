"""
Exact state-vector solver using the quantum-n-switch.

The switch is simulated as its defining block map
``|x>|psi> -> |x> Pi_x |psi>``; the control is one qudit of dimension n_x.
Each gate is called once, so the query count is n by construction.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ReadoutAmbiguous
from .hadamard import apply_hadamard
from .hpp import HPPInstance, as_gate_stack
from .qmat import TOL

READOUT_THRESHOLD = 1 - 1e-6
MAX_N = 16


@dataclass
class StateVector:
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.size != int(np.prod(self.dims)):
            raise ValueError(f"{self.amplitudes.size} amplitudes for register dims {self.dims}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    @classmethod
    def basis(cls, dim: int, index: int = 0) -> "StateVector":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1
        return cls((dim,), v)


@dataclass
class SwitchReport:
    recovered_y: tuple
    query_count: int
    residual: float
    final_target_fidelity: float
    wall_ms: float = 0.0
    final_state: StateVector | None = field(default=None, repr=False)


def _check_n(hpp, max_n):
    if hpp.n > max_n:
        raise ValueError(f"instance has n={hpp.n} gates, above the cap of {max_n}")


def apply_n_switch(hpp: HPPInstance, gates, state: StateVector) -> StateVector:
    """Apply S_n to a (control x target) state with control dim n_x."""
    d = hpp.gate_dim
    if state.dims != (hpp.n_x, d):
        raise ValueError(f"state dims {state.dims} do not match (n_x, d) = {(hpp.n_x, d)}")
    g = as_gate_stack(gates, hpp.n, d)
    amp = state.amplitudes.reshape(hpp.n_x, d).copy()
    # branch x gets gates[perms[x, step]] at every step
    for step in range(hpp.n):
        amp = np.einsum("xij,xj->xi", g[hpp.perms[:, step]], amp)
    return StateVector(state.dims, amp.reshape(-1))


def switch_solve(hpp: HPPInstance, gates, target_init=None, tol: float = TOL,
                 max_n: int = MAX_N) -> SwitchReport:
    """Prepare uniform control, apply S_n, undo the Hadamard transform, read y."""
    _check_n(hpp, max_n)
    t0 = time.perf_counter()
    d = hpp.gate_dim
    if target_init is None:
        psi = np.zeros(d, dtype=complex)
        psi[0] = 1
    else:
        psi = np.asarray(getattr(target_init, "amplitudes", target_init), dtype=complex).reshape(-1)
        if psi.size != d or abs(np.linalg.norm(psi) - 1) > tol:
            raise ValueError("target_init must be a normalized vector of the gate dimension")
    control = np.full(hpp.n_x, 1 / np.sqrt(hpp.n_x), dtype=complex)
    state = StateVector((hpp.n_x, d), np.outer(control, psi))
    state = apply_n_switch(hpp, gates, state)

    amp = apply_hadamard(hpp.signs, state.amplitudes.reshape(hpp.n_x, d), inverse=True)
    probs = np.sum(np.abs(amp) ** 2, axis=1)
    y = int(np.argmax(probs))
    if probs[y] < READOUT_THRESHOLD:
        raise ReadoutAmbiguous(
            f"largest control probability {probs[y]:.6g} is below {READOUT_THRESHOLD}; promise violated?")
    others = np.delete(np.sqrt(probs), y)
    residual = max(1 - float(np.sqrt(probs[y])), float(others.max()) if others.size else 0.0)

    g = as_gate_stack(gates, hpp.n, d)
    expected = psi
    for idx in hpp.perms[0]:
        expected = g[idx] @ expected
    fid = float(abs(np.vdot(expected, amp[y])) / np.linalg.norm(amp[y]))
    wall = (time.perf_counter() - t0) * 1e3
    return SwitchReport(hpp.decode(y), hpp.n, residual, fid, wall,
                        StateVector((hpp.n_x, d), amp.reshape(-1)))


def schmidt_values(state: StateVector) -> np.ndarray:
    """Singular values of the control x target amplitude matrix."""
    return np.linalg.svd(state.amplitudes.reshape(state.dims[0], -1), compute_uv=False)

