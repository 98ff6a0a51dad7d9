"""
Hadamard sign matrices s(x, y) and the unitary transforms built from them.

A :class:`SignMatrix` is stored as a tuple of small +/-1 factors.  The full
matrix is their Kronecker product with the *first* factor's index varying
fastest, i.e. for two factors of sizes m and n the composite labels are
``x = x2*m + x1`` and ``y = y2*m + y1``.  ``entries[y, x]`` is s(x, y):
rows are labelled by y and columns by x.

Transforms are applied factor by factor (a mixed-radix fast Walsh-Hadamard
transform), so large generated instances never need the dense matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

MAX_SYLVESTER_K = 20
DENSE_CAP = 1 << 15
SMALL_DENSE = 256  # below this size transforms use a cached dense matrix


def _check_factor(f) -> np.ndarray:
    a = np.asarray(f)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"sign factor must be a non-empty square matrix, got shape {a.shape}")
    if not np.all((a == 1) | (a == -1)):
        raise ValueError("sign matrix entries must be exactly +1 or -1")
    a = a.astype(np.int8)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SignMatrix:
    factors: tuple = field()

    def __post_init__(self):
        fs = tuple(_check_factor(f) for f in self.factors)
        if not fs:
            raise ValueError("a SignMatrix needs at least one factor")
        # drop redundant 1x1 [[+1]] factors; keep a single one for the trivial matrix
        kept = tuple(f for f in fs if f.shape != (1, 1) or f[0, 0] != 1) or fs[:1]
        object.__setattr__(self, "factors", kept)

    @classmethod
    def from_dense(cls, entries) -> "SignMatrix":
        return cls((np.asarray(entries),))

    @property
    def size(self) -> int:
        return int(np.prod([f.shape[0] for f in self.factors]))

    @property
    def radices(self) -> tuple:
        return tuple(f.shape[0] for f in self.factors)

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        """Full ``size x size`` int8 matrix, rows y and columns x."""
        if self.size > cap:
            raise ValueError(f"refusing to densify a {self.size}x{self.size} sign matrix (cap {cap})")
        # first factor fastest -> it is the innermost Kronecker operand
        return reduce(lambda acc, f: np.kron(f, acc), self.factors[1:], self.factors[0]).astype(np.int8)

    def __getitem__(self, xy) -> int:
        """``s[x, y]`` in the (column x, row y) convention."""
        x, y = xy
        val = 1
        for f in self.factors:
            m = f.shape[0]
            val *= int(f[y % m, x % m])
            x //= m
            y //= m
        return val

    def _contract(self, vec, transpose: bool) -> np.ndarray:
        v = np.asarray(vec)
        n = self.size
        if v.shape[0] != n:
            raise ValueError(f"leading axis of length {v.shape[0]} does not match sign matrix size {n}")
        rest = v.shape[1:]
        if n <= SMALL_DENSE and len(self.factors) > 1:
            e = self._small_dense()
            return np.tensordot(e.T if transpose else e, v, axes=([1], [0]))
        # C-order reshape: last listed axis varies fastest, so reverse the factors
        t = v.reshape(tuple(reversed(self.radices)) + rest)
        nf = len(self.factors)
        for i, f in enumerate(self.factors):
            ax = nf - 1 - i
            m = f.T if transpose else f
            t = np.moveaxis(np.tensordot(m, t, axes=([1], [ax])), 0, ax)
        return t.reshape((n,) + rest)

    def _small_dense(self) -> np.ndarray:
        cached = self.__dict__.get("_dense_cache")
        if cached is None:
            cached = self.dense().astype(float)
            object.__setattr__(self, "_dense_cache", cached)
        return cached

    def row_sums(self, vec) -> np.ndarray:
        """``out[y] = sum_x s(x, y) vec[x]`` along the leading axis."""
        return self._contract(vec, transpose=False)

    def column_sums(self, vec) -> np.ndarray:
        """``out[x] = sum_y s(x, y) vec[y]`` along the leading axis."""
        return self._contract(vec, transpose=True)

    def to_json(self):
        return [f.astype(int).tolist() for f in self.factors]


def is_hadamard(s) -> bool:
    """Exact integer row-orthogonality test ``E E^T == n I``."""
    e = s.dense() if isinstance(s, SignMatrix) else np.asarray(s)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        return False
    if not np.all((e == 1) | (e == -1)):
        return False
    e = e.astype(np.int64)
    n = e.shape[0]
    return bool(np.array_equal(e @ e.T, n * np.eye(n, dtype=np.int64)))


_H2 = np.array([[1, 1], [1, -1]], dtype=np.int8)


def sylvester(k: int) -> SignMatrix:
    """2^k x 2^k matrix with s(x, y) = (-1)^popcount(x & y)."""
    if not 0 <= k <= MAX_SYLVESTER_K:
        raise ValueError(f"sylvester order must lie in [0, {MAX_SYLVESTER_K}], got {k}")
    if k == 0:
        return SignMatrix((np.ones((1, 1), dtype=np.int8),))
    return SignMatrix((_H2,) * k)


def kron_sign(s1: SignMatrix, s2: SignMatrix, check: bool = True) -> SignMatrix:
    """Sign matrix of the composite problem: s((x1,x2),(y1,y2)) = s2(x2,y2) s1(x1,y1).

    ``s1`` is the outer problem; its index varies fastest.
    """
    if check:
        for f in s1.factors + s2.factors:
            if not is_hadamard(f):
                raise ValueError("kron_sign input is not a Hadamard matrix")
    return SignMatrix(s1.factors + s2.factors)


def hadamard_unitary(s: SignMatrix) -> np.ndarray:
    """Dense H with ``H|y> = n^-1/2 sum_x s(x, y)|x>``; column y holds s(., y)."""
    return s.dense().T.astype(complex) / np.sqrt(s.size)


def inverse_hadamard_unitary(s: SignMatrix) -> np.ndarray:
    return s.dense().astype(complex) / np.sqrt(s.size)


def apply_hadamard(s: SignMatrix, vec, inverse: bool = False) -> np.ndarray:
    """Apply H (or its inverse) to the leading axis of ``vec`` without densifying."""
    out = s.row_sums(vec) if inverse else s.column_sums(vec)
    return out / np.sqrt(s.size)
