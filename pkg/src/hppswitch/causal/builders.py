"""Circuit constructions: the minimal three-gate circuits and the n^2 switch simulation."""
from __future__ import annotations

import numpy as np

from ..hadamard import sylvester
from ..hpp import HPPInstance
from .ir import CausalCircuit


def build_two_control_circuit() -> CausalCircuit:
    """Five-query circuit for pair(slot1:pair): Pi_(x1,x2) over U0, U1, U2.

    c1=1 moves U0 from first to last, c2=1 moves U1 from before U2 to after it.
    """
    circ = CausalCircuit()
    for name in ("c1", "c2"):
        circ.add_control(name, 2)
    for name in ("t", "a0", "a1"):
        circ.add_wire(name)
    h = sylvester(1)
    circ.hadamard("c1", h)
    circ.hadamard("c2", h)
    _sandwich(circ, "c1", (1,), "a0", 0)
    _sandwich(circ, "c2", (1,), "a1", 1)
    circ.blackbox(2, "t")
    _sandwich(circ, "c2", (0,), "a1", 1)
    _sandwich(circ, "c1", (0,), "a0", 0)
    for name in ("c1", "c2"):
        circ.inv_hadamard(name, h)
    circ.measure("c1")
    circ.measure("c2")
    return circ


def build_one_control_circuit() -> CausalCircuit:
    """Five-query, single-control circuit for the triple problem (U2U1U0 vs U0U1U2)."""
    circ = CausalCircuit()
    circ.add_control("c", 2)
    for name in ("t", "a0", "a1"):
        circ.add_wire(name)
    h = sylvester(1)
    circ.hadamard("c", h)
    _sandwich(circ, "c", (1,), "a0", 0)
    _sandwich(circ, "c", (1,), "a1", 1)
    circ.blackbox(2, "t")
    _sandwich(circ, "c", (0,), "a1", 1)
    _sandwich(circ, "c", (0,), "a0", 0)
    circ.inv_hadamard("c", h)
    circ.measure("c")
    return circ


def _sandwich(circ, ctrl, values, aux, gate):
    circ.cswap(ctrl, values, "t", aux)
    circ.blackbox(gate, "t")
    circ.cswap(ctrl, values, "t", aux)


def emit_sim_switch(circ: CausalCircuit, hpp: HPPInstance, target: str, control: str,
                    aux_names=None, gate_ids=None) -> str:
    """Append the n^2-query simulation of S_n acting on wire ``target``.

    At step i, the auxiliary of the gate that permutation x applies i-th is
    swapped with the target (conditioned on x), every gate then acts once on
    its own auxiliary wire, and the swap is undone.
    """
    if not all(np.all(f[0, :] == 1) for f in hpp.signs.factors):
        raise ValueError("control preparation needs a sign matrix whose y=0 row is all +1")
    n = hpp.n
    gate_ids = list(range(n)) if gate_ids is None else [int(g) for g in gate_ids]
    aux_names = [f"a{g}" for g in gate_ids] if aux_names is None else list(aux_names)
    circ.add_control(control, hpp.n_x)
    for name in aux_names:
        circ.add_wire(name, hpp.gate_dim)
    circ.hadamard(control, hpp.signs)
    for step in range(n):
        col = hpp.perms[:, step]
        swaps = [(aux_names[g], np.flatnonzero(col == g)) for g in range(n)]
        for aux, xs in swaps:
            circ.cswap(control, xs, target, aux)
        for g in range(n):
            circ.blackbox(gate_ids[g], aux_names[g])
        for aux, xs in swaps:
            circ.cswap(control, xs, target, aux)
    circ.inv_hadamard(control, hpp.signs)
    circ.measure(control)
    return control


# names used by the CLI solver choices
build_circuit_fig3 = build_two_control_circuit
build_circuit_fig4 = build_one_control_circuit


def build_sim_switch_circuit(hpp: HPPInstance) -> CausalCircuit:
    """Registers: control ``c`` (dim n_x), target ``t``, auxiliaries ``a0..a{n-1}``."""
    circ = CausalCircuit()
    circ.add_wire("t", hpp.gate_dim)
    emit_sim_switch(circ, hpp, "t", "c")
    return circ
