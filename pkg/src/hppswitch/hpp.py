"""
Hadamard promise problem instances and their recursive composition.

An instance fixes ``n`` gates and ``n_x`` permutations.  ``perms[x]`` lists
gate indices in application order, so ``perms[x] = (0, 1, 2)`` stands for the
product U2 U1 U0.  The promise is ``Pi_x = s(x, y) Pi_0`` for one unknown y.

Labels: y (and x) are linear indices into a mixed-radix label vector with
``label_shape`` as radices, first component varying fastest.  This matches the
Kronecker convention of :mod:`hppswitch.hadamard`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import PromiseViolated
from .hadamard import SignMatrix, is_hadamard, kron_sign, sylvester
from .qmat import TOL, as_matrix
from .tree import PAIR, TRIPLE, TWO_PERM, Node


@dataclass(frozen=True, eq=False)
class HPPInstance:
    perms: np.ndarray  # (n_x, n) int, application order
    signs: SignMatrix
    label_shape: tuple
    gate_dim: int = 2
    tree: Node | None = None

    def __post_init__(self):
        p = np.array(self.perms, dtype=np.int64)
        if p.ndim != 2 or p.shape[0] == 0 or p.shape[1] == 0:
            raise ValueError(f"perms must be a non-empty (n_x, n) array, got shape {p.shape}")
        n_x, n = p.shape
        if not np.array_equal(np.sort(p, axis=1), np.broadcast_to(np.arange(n), p.shape)):
            raise ValueError("every row of perms must be a permutation of 0..n-1")
        if self.signs.size != n_x:
            raise ValueError(f"{n_x} permutations but a sign matrix of size {self.signs.size}")
        shape = tuple(int(c) for c in self.label_shape)
        if int(np.prod(shape, dtype=np.int64)) != n_x:
            raise ValueError(f"label_shape {shape} does not multiply to n_x={n_x}")
        if not all(np.all(f[:, 0] == 1) for f in self.signs.factors):
            # s(0, y) = 1 is forced by Pi_0 = s(0, y) Pi_0
            raise ValueError("column x=0 of the sign matrix must be all +1")
        p.setflags(write=False)
        object.__setattr__(self, "perms", p)
        object.__setattr__(self, "label_shape", shape)

    @property
    def n(self) -> int:
        return self.perms.shape[1]

    @property
    def n_x(self) -> int:
        return self.perms.shape[0]

    def decode(self, y: int) -> tuple:
        return decode_label(y, self.label_shape)

    def encode(self, labels: Sequence[int]) -> int:
        return encode_label(labels, self.label_shape)

    def all_labels(self):
        for y in range(self.n_x):
            yield self.decode(y)


def decode_label(y: int, shape: Sequence[int]) -> tuple:
    out = []
    for r in shape:
        out.append(int(y % r))
        y //= r
    if y:
        raise ValueError("label index out of range")
    return tuple(out)


def encode_label(labels: Sequence[int], shape: Sequence[int]) -> int:
    labels = tuple(int(v) for v in labels)
    if len(labels) != len(shape):
        raise ValueError(f"expected {len(shape)} sub-labels, got {len(labels)}")
    y, mult = 0, 1
    for v, r in zip(labels, shape):
        if not 0 <= v < r:
            raise ValueError(f"sub-label {v} out of range [0, {r})")
        y += v * mult
        mult *= r
    return y


def trivial_hpp() -> HPPInstance:
    """One gate, one permutation, no label."""
    return HPPInstance(np.array([[0]]), sylvester(0), ())


def pair_hpp() -> HPPInstance:
    """U0, U1 commute (y=0) or anticommute (y=1): Pi_0 = U1 U0, Pi_1 = U0 U1."""
    return HPPInstance(np.array([[0, 1], [1, 0]]), sylvester(1), (2,), tree=Node(PAIR, 2))


def triple_hpp() -> HPPInstance:
    """Pi_0 = U2 U1 U0 and Pi_1 = U0 U1 U2."""
    return HPPInstance(np.array([[0, 1, 2], [2, 1, 0]]), sylvester(1), (2,), tree=Node(TRIPLE, 3))


def two_permutation_hpp(n: int) -> HPPInstance:
    """Forward product versus fully reversed product of n gates."""
    if n < 2:
        raise ValueError("two-permutation problem needs n >= 2")
    fwd = np.arange(n)
    return HPPInstance(np.stack([fwd, fwd[::-1]]), sylvester(1), (2,), tree=Node(TWO_PERM, n))


def compose_hpp(outer: HPPInstance, slot: int, inner: HPPInstance) -> HPPInstance:
    """Replace gate ``slot`` of ``outer`` by every permutation of ``inner``.

    Inner gates take indices slot..slot+inner.n-1; outer gates above ``slot``
    shift up by inner.n-1.  The new label is (x1, x2) -> x2*outer.n_x + x1.
    """
    if not 0 <= slot < outer.n:
        raise ValueError(f"slot {slot} out of range for a {outer.n}-gate instance")
    if outer.gate_dim != inner.gate_dim:
        raise ValueError("gate dimensions differ")
    shift = inner.n - 1
    outer_p = np.where(outer.perms > slot, outer.perms + shift, outer.perms)
    inner_p = inner.perms + slot
    n_new = outer.n + shift
    out = np.empty((inner.n_x, outer.n_x, n_new), dtype=np.int64)
    for x1 in range(outer.n_x):
        row = outer_p[x1]
        pos = int(np.flatnonzero(outer.perms[x1] == slot)[0])
        out[:, x1, :pos] = row[:pos]
        out[:, x1, pos:pos + inner.n] = inner_p
        out[:, x1, pos + inner.n:] = row[pos + 1:]
    return HPPInstance(
        out.reshape(inner.n_x * outer.n_x, n_new),
        kron_sign(outer.signs, inner.signs, check=False),
        outer.label_shape + inner.label_shape,
        outer.gate_dim,
    )


def fundamental_hpp(node: Node) -> HPPInstance:
    if node.kind == PAIR:
        return pair_hpp()
    if node.kind == TRIPLE:
        return triple_hpp()
    return two_permutation_hpp(node.k)


@lru_cache(maxsize=256)
def build_from_tree(tree: Node) -> HPPInstance:
    """Fold :func:`compose_hpp` over the tree.

    Children are spliced in ascending slot order, so gate numbering follows the
    leaves left to right and the label vector is (node label, then each child's
    labels in slot order), recursively.
    """
    inst = fundamental_hpp(tree)
    offsets = tree.block_offsets()
    for slot, child in tree.children:
        inst = compose_hpp(inst, offsets[slot], build_from_tree(child))
    return HPPInstance(inst.perms, inst.signs, inst.label_shape, inst.gate_dim, tree=tree)


def as_gate_stack(gates, n: int | None = None, dim: int = 2, tol: float = TOL) -> np.ndarray:
    """Normalize a gate list / dict / array to a unitary-checked (n, dim, dim) array."""
    if isinstance(gates, dict):
        count = n if n is not None else len(gates)
        missing = set(range(count)) - set(gates)
        if missing:
            raise ValueError(f"gates missing for indices {sorted(missing)}")
        gates = [gates[i] for i in range(count)]
    stack = np.stack([as_matrix(g) for g in gates]) if not isinstance(gates, np.ndarray) else gates.astype(complex)
    if stack.ndim != 3 or stack.shape[1:] != (dim, dim):
        raise ValueError(f"expected {dim}x{dim} gates, got array of shape {stack.shape}")
    if n is not None and stack.shape[0] != n:
        raise ValueError(f"expected {n} gates, got {stack.shape[0]}")
    err = np.abs(np.conj(np.swapaxes(stack, 1, 2)) @ stack - np.eye(dim)).max(axis=(1, 2))
    bad = np.flatnonzero(err > max(tol, TOL))
    if bad.size:
        raise ValueError(f"gate(s) {bad.tolist()} not unitary within {tol:g}")
    return stack


def permutation_products(hpp: HPPInstance, gates) -> np.ndarray:
    """All Pi_x as an (n_x, d, d) array, built one application step at a time."""
    g = as_gate_stack(gates, hpp.n, hpp.gate_dim)
    prods = np.broadcast_to(np.eye(hpp.gate_dim, dtype=complex), (hpp.n_x, hpp.gate_dim, hpp.gate_dim)).copy()
    for step in range(hpp.n):
        prods = g[hpp.perms[:, step]] @ prods
    return prods


def extract_signs(hpp: HPPInstance, gates, tol: float = TOL) -> np.ndarray:
    """sigma_x in {+1, -1} with Pi_x = sigma_x Pi_0; raises PromiseViolated otherwise."""
    prods = permutation_products(hpp, gates)
    ref = prods[0]
    plus = np.abs(prods - ref).max(axis=(1, 2))
    minus = np.abs(prods + ref).max(axis=(1, 2))
    sigma = np.where(plus <= tol, 1, np.where(minus <= tol, -1, 0)).astype(np.int64)
    bad = np.flatnonzero(sigma == 0)
    if bad.size:
        raise PromiseViolated(
            f"Pi_{int(bad[0])} is not +/- Pi_0 ({bad.size} of {hpp.n_x} permutations fail)")
    return sigma


def verify_promise(hpp: HPPInstance, gates, tol: float = TOL) -> tuple:
    """Return the label vector y for which the gates satisfy the promise."""
    sigma = extract_signs(hpp, gates, tol)
    overlaps = hpp.signs.row_sums(sigma)
    y = int(np.argmax(overlaps))
    if overlaps[y] != hpp.n_x:
        raise PromiseViolated("extracted signs match no row of the sign matrix")
    # rows of a Hadamard matrix are distinct, so no second row can reach n_x
    assert np.count_nonzero(overlaps == hpp.n_x) == 1
    return hpp.decode(y)


def promise_residual(hpp: HPPInstance, gates, labels: Sequence[int]) -> float:
    """max_x ||Pi_x - s(x, y) Pi_0||_max for the given label vector."""
    prods = permutation_products(hpp, gates)
    y = hpp.encode(labels)
    onehot = np.zeros(hpp.n_x)
    onehot[y] = 1.0
    col = hpp.signs.column_sums(onehot)  # s(x, y) for all x
    return float(np.abs(prods - col[:, None, None] * prods[0]).max())


def check_hadamard(hpp: HPPInstance) -> bool:
    return all(is_hadamard(f) for f in hpp.signs.factors)
