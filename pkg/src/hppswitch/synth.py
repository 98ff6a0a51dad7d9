"""
Qubit gates satisfying a chosen label y, built top-down along a composition tree.

Every live gate is tracked symbolically as either the identity or
``F sigma_z F^dag`` for a known SU(2) frame F.  Replacement rules split a
tracked gate into the gates of a pair or triple whose Pi_0 is proportional to
it.  Global phases of individual gates never affect the promise (each gate
appears exactly once in every permutation), so the Hermitian ``F sigma_y F^dag``
stands in for ``F (i sigma_y) F^dag`` and every non-identity gate stays of the
form ``F' sigma_z F'^dag``.

The only dead end is splitting the identity into an anticommuting pair; that is
reported as :class:`Unsatisfiable` rather than raised.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hpp import build_from_tree, promise_residual, verify_promise
from .qmat import TOL, frame, pauli, random_unitary, z_rotation
from .tree import PAIR, TRIPLE, TWO_PERM, Node

_X, _Y, _Z, _I = (pauli(c) for c in "XYZI")
_R2 = 1 / np.sqrt(2)

# F sigma_z F^dag = sigma_x, with F sigma_x F^dag = (sigma_y - sigma_z)/sqrt2 and
# F sigma_y F^dag = (sigma_y + sigma_z)/sqrt2; this frame reproduces the
# tabulated three-gate examples when sigma_x is split into an anticommuting pair.
FRAME_X = frame([1, 0, 0], [0, _R2, -_R2])
FRAME_Y = frame([0, 1, 0], [0, 0, 1])
FRAME_Z = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class Tracked:
    frame: np.ndarray | None  # None means the identity gate

    @property
    def matrix(self) -> np.ndarray:
        if self.frame is None:
            return _I.copy()
        return self.frame @ _Z @ self.frame.conj().T

    def rotated(self, w: np.ndarray) -> "Tracked":
        return self if self.frame is None else Tracked(w @ self.frame)


IDENTITY = Tracked(None)


def _uz(f):
    return Tracked(f)


@dataclass(frozen=True)
class Unsatisfiable:
    """No qubit gates exist along this synthesis path."""
    path: str
    labels: tuple
    reason: str = "identity cannot split into anticommuting unitaries"

    def __str__(self):
        return f"unsatisfiable at {self.path}: {self.reason}"


class _DeadEnd(Exception):
    def __init__(self, path):
        self.path = path


# root examples: sub-label -> tracked gates
_ROOT_TABLES = {
    2: {0: (FRAME_X, FRAME_X), 1: (FRAME_Y, FRAME_X)},            # sigma_x sigma_x / sigma_y sigma_x
    3: {0: (FRAME_Y, FRAME_Z, FRAME_Z), 1: (FRAME_X, FRAME_Y, FRAME_Z)},  # Y Z Z / X Y Z
}


def _root_gates(node: Node, label: int, w: np.ndarray) -> list:
    if node.kind == TWO_PERM and node.k not in _ROOT_TABLES:
        raise ValueError(f"no gate synthesis rule for twoperm({node.k}); supply gates explicitly")
    return [_uz(w @ f) for f in _ROOT_TABLES[node.k][label]]


def _split(kind: str, label: int, g: Tracked, rng, path: str) -> list:
    if kind == PAIR:
        if g.frame is None:
            if label == 1:
                raise _DeadEnd(path)
            u = _fresh_frame(rng)
            return [_uz(u), _uz(u)]
        if label == 0:
            return [_uz(g.frame), IDENTITY]
        angle = 0.0 if rng is None else float(rng.uniform(0, 2 * np.pi))
        w = g.frame @ z_rotation(angle)
        # (W s_y W^dag applied first, then W s_x W^dag): product = i W s_z W^dag
        return [_uz(w @ FRAME_Y), _uz(w @ FRAME_X)]
    if kind == TRIPLE:
        if g.frame is None:
            u = _fresh_frame(rng)
            if label == 0:
                return [_uz(u @ FRAME_X), _uz(u @ FRAME_X), IDENTITY]
            return [_uz(u @ FRAME_X), _uz(u @ FRAME_Y), _uz(u)]
        u = g.frame
        if label == 0:
            return [_uz(u), _uz(u @ FRAME_X), _uz(u @ FRAME_X)]
        return [IDENTITY, _uz(u @ FRAME_X), _uz(u @ FRAME_Y)]
    raise ValueError(f"no replacement rule for {kind} nodes")


def _fresh_frame(rng):
    return FRAME_Z if rng is None else random_unitary(2, rng)


def _expand(node: Node, labels: list, incoming: Tracked | None, rng, w, path: str) -> list:
    label = labels.pop(0)
    if incoming is None:
        slots = _root_gates(node, label, w)
    else:
        slots = _split(node.kind, label, incoming, rng, path)
    out = []
    for s, g in enumerate(slots):
        child = node.child(s)
        if child is None:
            out.append(g)
        else:
            out.extend(_expand(child, labels, g, rng, w, f"{path}.slot{s}"))
    return out


def synthesize_gates(tree: Node, labels: Sequence[int], seed: int | None = None, tol: float = TOL):
    """Gates for which ``build_from_tree(tree)`` has solution ``labels``.

    ``seed=None`` reproduces the tabulated example gates; an integer seed draws
    a random global frame, random z-rotations in anticommuting splits and random
    frames when the identity is split.  Returns a list of 2x2 arrays, or an
    :class:`Unsatisfiable` record.
    """
    labels = tuple(int(v) for v in labels)
    inst = build_from_tree(tree)
    if len(labels) != len(inst.label_shape):
        raise ValueError(f"tree {tree} takes {len(inst.label_shape)} sub-labels, got {len(labels)}")
    inst.encode(labels)  # range check
    rng = None if seed is None else np.random.default_rng(seed)
    w = np.eye(2, dtype=complex) if rng is None else random_unitary(2, rng)
    try:
        tracked = _expand(tree, list(labels), None, rng, w, "root")
    except _DeadEnd as e:
        return Unsatisfiable(e.path, labels)
    gates = [t.matrix for t in tracked]
    got = verify_promise(inst, gates, tol)
    if got != labels or promise_residual(inst, gates, labels) > tol:
        raise RuntimeError(f"synthesized gates verify as {got}, expected {labels}")
    return gates


def satisfiable_labels(tree: Node) -> tuple:
    """Satisfiable label vectors and :class:`Unsatisfiable` records, over all y."""
    inst = build_from_tree(tree)
    ok, bad = [], []
    for labels in inst.all_labels():
        res = synthesize_gates(tree, labels)
        if isinstance(res, Unsatisfiable):
            bad.append(res)
        else:
            ok.append(labels)
    return ok, bad


# Tabulated example rows, keyed by tree spec then label vector.
_A = (_Y + _Z) * _R2
_B = (_Y - _Z) * _R2
EXAMPLE_GATES = {
    "pair": {(0,): (_X, _X), (1,): (_Y, _X)},
    "pair(slot1:pair)": {
        (0, 0): (_X, _X, _I),
        (0, 1): (_X, _A, _B),
        (1, 0): (_Y, _X, _I),
        (1, 1): (_Y, _A, _B),
    },
    "triple": {(0,): (_Y, _Z, _Z), (1,): (_X, _Y, _Z)},
}
EXAMPLE_GATES["twoperm(2)"] = EXAMPLE_GATES["pair"]
EXAMPLE_GATES["twoperm(3)"] = EXAMPLE_GATES["triple"]


def example_gates(tree: Node | str, labels: Sequence[int]) -> list:
    key = tree if isinstance(tree, str) else tree.spec()
    try:
        return [g.copy() for g in EXAMPLE_GATES[key][tuple(int(v) for v in labels)]]
    except KeyError:
        raise KeyError(f"no tabulated example gates for {key} with y={tuple(labels)}") from None
