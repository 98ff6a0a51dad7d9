"""
Dense complex-matrix helpers and the small qubit toolbox used everywhere else.

Matrices are plain ``numpy`` arrays of dtype complex128. Gate lists store the
gates in *application order*: the first gate applied is the first entry, so
the matrix of a sequence is built right-to-left (first-applied factor on the
right).
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

TOL = 1e-9

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> np.ndarray:
    """Return a fresh copy of the 2x2 Pauli matrix ``I``, ``X``, ``Y`` or ``Z``."""
    try:
        return _PAULI[name.upper()].copy()
    except (KeyError, AttributeError):
        raise ValueError(f"unknown Pauli name {name!r}") from None


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def tensor(a, b) -> np.ndarray:
    """Kronecker product; entry ``(i*db + k, j*db + l)`` is ``a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def is_unitary(u, tol: float = TOL) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def product_of_permutation(gates: Sequence, perm: Sequence[int]) -> np.ndarray:
    """Matrix of applying ``gates[perm[0]]`` first, then ``gates[perm[1]]``, ...

    The result is ``gates[perm[-1]] @ ... @ gates[perm[0]]``.
    """
    if len(perm) == 0:
        raise ValueError("empty permutation")
    mats = [as_matrix(gates[i]) for i in perm]
    dim = mats[0].shape[0]
    out = np.eye(dim, dtype=complex)
    for m in mats:
        if m.shape != (dim, dim):
            raise ValueError(f"gate of shape {m.shape} in a product of {dim}x{dim} gates")
        out = m @ out
    return out


def proportionality_sign(a, b, tol: float = TOL) -> int | None:
    """Return +1 if ``a == b``, -1 if ``a == -b`` (entrywise within ``tol``), else None.

    ``b`` must be unitary; None means the pair violates a +/-1 promise.
    """
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if not is_unitary(b, tol=max(tol, TOL)):
        raise ValueError("reference matrix is not unitary")
    if np.max(np.abs(a - b)) <= tol:
        return 1
    if np.max(np.abs(a + b)) <= tol:
        return -1
    return None


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def su2_from_rotation(rot) -> np.ndarray:
    """SU(2) element U with ``U sigma_k U^dag = sum_j rot[j, k] sigma_j``.

    ``rot`` is a proper 3x3 rotation matrix acting on Bloch vectors.
    """
    from scipy.spatial.transform import Rotation

    qx, qy, qz, qw = Rotation.from_matrix(np.asarray(rot, dtype=float)).as_quat()
    return (qw * _PAULI["I"] - 1j * (qx * _PAULI["X"] + qy * _PAULI["Y"] + qz * _PAULI["Z"]))


def frame(z_axis, x_axis) -> np.ndarray:
    """SU(2) frame sending the Bloch z axis to ``z_axis`` and x to ``x_axis``."""
    z = np.asarray(z_axis, dtype=float)
    x = np.asarray(x_axis, dtype=float)
    z = z / np.linalg.norm(z)
    x = x / np.linalg.norm(x)
    if abs(z @ x) > 1e-12:
        raise ValueError("frame axes must be orthogonal")
    y = np.cross(z, x)
    return su2_from_rotation(np.column_stack([x, y, z]))


def z_rotation(angle: float) -> np.ndarray:
    """Rotation about the Bloch z axis; commutes with sigma_z."""
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def bloch_operator(vec) -> np.ndarray:
    """``n . sigma`` for a real 3-vector n."""
    nx, ny, nz = np.asarray(vec, dtype=float)
    return nx * _PAULI["X"] + ny * _PAULI["Y"] + nz * _PAULI["Z"]
