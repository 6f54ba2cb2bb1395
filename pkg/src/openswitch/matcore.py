"""Dense complex linear-algebra kernels for small (<= 16x16) matrices.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
The Hermitian eigensolver is a cyclic complex Jacobi method; for matrices of
this size it is fast enough and gives reproducible output, including a fixed
eigenvector phase convention.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "NumericalError",
    "NotPSDError",
    "HermitianEigen",
    "as_matrix",
    "dagger",
    "kron",
    "partial_trace",
    "herm_eig",
    "unitary_from_hamiltonian",
    "psd_sqrt",
]

MAX_DIM = 2**20
HERMITIAN_TOL = 1e-10
PSD_FAIL = 1e-8


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class NumericalError(ArithmeticError):
    """An iterative kernel failed to converge."""


class NotPSDError(ValueError):
    """Matrix has an eigenvalue clearly below zero."""


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns orthonormal


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite, non-empty 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def kron(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"kron result {rows}x{cols} exceeds {MAX_DIM}")
    return np.kron(a, b)


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original tensor order.
    """
    rho = as_matrix(rho, square=True)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {dims} do not factor a {rho.shape[0]}-dim matrix")
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} subsystems")

    nsub = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:nsub])
    col = list(letters[nsub : 2 * nsub])
    for i in range(nsub):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(dk, dk)


def _check_hermitian(a: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - dagger(a)).max() > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return 0.5 * (a + dagger(a))


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # first non-negligible component of each column made real positive
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        z = col[idx]
        if abs(z) > 0:
            vecs[:, k] = col * (np.conj(z) / abs(z))
    return vecs


def herm_eig(a) -> HermitianEigen:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back in descending order. Each eigenvector is scaled so
    that its first non-negligible component is real and positive.

    Raises NumericalError if the off-diagonal norm has not converged after
    ``100 * dim`` sweeps.
    """
    a = _check_hermitian(as_matrix(a, square=True)).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        w = np.real(np.diag(a)).copy()
        return HermitianEigen(w, v)

    tol = 1e-15 * n * scale
    offdiag = ~np.eye(n, dtype=bool)
    tiny = 1e-300
    for _ in range(100 * n):
        off = np.linalg.norm(a[offdiag])
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= tiny:
                    continue
                ph = np.conj(apq) / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # diag(1, ph) @ real rotation
                g = np.array([[c, s], [-s * ph, c * ph]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        off = np.linalg.norm(a[offdiag])
        if off > tol:
            raise NumericalError(f"Jacobi did not converge in {100 * n} sweeps (off={off:.3e})")

    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return HermitianEigen(w[order].copy(), _fix_phases(v[:, order].copy()))


def unitary_from_hamiltonian(h, t: float) -> np.ndarray:
    """exp(-i t h) for Hermitian ``h``."""
    w, v = herm_eig(h)
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def psd_sqrt(a) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-8, 0) are treated as round-off and clamped to zero.
    """
    w, v = herm_eig(a)
    if w[-1] < -PSD_FAIL:
        raise NotPSDError(f"smallest eigenvalue {w[-1]:.3e} is below -{PSD_FAIL:g}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)
