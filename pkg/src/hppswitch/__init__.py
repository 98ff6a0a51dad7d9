"""Hadamard promise problems: exact quantum-switch and fixed-order solvers."""
from .errors import HPPError, NonDeterministicMeasurement, PromiseViolated, ReadoutAmbiguous, TreeSpecError
from .hadamard import SignMatrix, is_hadamard, kron_sign, sylvester
from .hpp import (
    HPPInstance,
    build_from_tree,
    compose_hpp,
    pair_hpp,
    triple_hpp,
    two_permutation_hpp,
    verify_promise,
)
from .switch import StateVector, SwitchReport, switch_solve
from .synth import Unsatisfiable, example_gates, satisfiable_labels, synthesize_gates
from .tree import Node, pair, parse_tree, triple, twoperm

__all__ = [
    "HPPError",
    "HPPInstance",
    "Node",
    "NonDeterministicMeasurement",
    "PromiseViolated",
    "ReadoutAmbiguous",
    "SignMatrix",
    "StateVector",
    "SwitchReport",
    "TreeSpecError",
    "Unsatisfiable",
    "build_from_tree",
    "compose_hpp",
    "is_hadamard",
    "kron_sign",
    "pair",
    "pair_hpp",
    "example_gates",
    "parse_tree",
    "satisfiable_labels",
    "switch_solve",
    "sylvester",
    "synthesize_gates",
    "triple",
    "triple_hpp",
    "two_permutation_hpp",
    "twoperm",
    "verify_promise",
]
