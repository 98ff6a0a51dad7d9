"""Fixed-order (causal) circuits, their executor and the solvers built on them."""
from .builders import (
    build_circuit_fig3,
    build_circuit_fig4,
    build_one_control_circuit,
    build_sim_switch_circuit,
    build_two_control_circuit,
    emit_sim_switch,
)
from .executor import MEASURE_THRESHOLD, QueryLedger, RunResult, run_circuit
from .ir import CausalCircuit
from .solvers import (
    CausalReport,
    query_bound,
    recursive_solve,
    solve_fig3,
    solve_fig4,
    solve_one_control,
    solve_sim_switch,
    solve_two_control,
)

__all__ = [
    "CausalCircuit",
    "CausalReport",
    "MEASURE_THRESHOLD",
    "QueryLedger",
    "RunResult",
    "build_circuit_fig3",
    "build_circuit_fig4",
    "build_one_control_circuit",
    "build_sim_switch_circuit",
    "build_two_control_circuit",
    "emit_sim_switch",
    "query_bound",
    "recursive_solve",
    "run_circuit",
    "solve_fig3",
    "solve_fig4",
    "solve_one_control",
    "solve_sim_switch",
    "solve_two_control",
]
