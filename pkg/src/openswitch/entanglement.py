"""Two-qubit concurrence (Wootters)."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .matcore import DimensionError, NotPSDError, herm_eig, kron, partial_trace, psd_sqrt
from .quantum import SY

__all__ = ["ConcurrenceResult", "spin_flip", "concurrence_mixed", "concurrence_pure", "concurrence"]

_YY = kron(SY, SY)
_CLAMP = 1e-10
_RANK_FLOOR = 1e-14


class ConcurrenceResult(NamedTuple):
    value: float
    lambdas: np.ndarray


def _two_qubit(rho) -> np.ndarray:
    m = np.asarray(getattr(rho, "mat", rho), dtype=complex)
    if m.shape != (4, 4):
        raise DimensionError(f"concurrence needs a 4x4 two-qubit state, got {m.shape}")
    return m


def spin_flip(rho) -> np.ndarray:
    """(sy (x) sy) rho* (sy (x) sy), conjugation in the computational basis."""
    m = _two_qubit(rho)
    return _YY @ m.conj() @ _YY


def concurrence_mixed(rho) -> ConcurrenceResult:
    """Wootters concurrence of a two-qubit density matrix.

    The lambdas are square roots of the eigenvalues of the Hermitian matrix
    sqrt(rho) rho~ sqrt(rho), which share their spectrum with rho rho~.
    """
    m = _two_qubit(rho)
    s = psd_sqrt(m)
    w, _ = herm_eig(s @ spin_flip(m) @ s)
    if w[-1] < -_CLAMP:
        raise NotPSDError(f"spin-flipped product has eigenvalue {w[-1]:.3e}")
    # entries under the roundoff level of the product are zero eigenvalues;
    # left alone, sqrt() would lift 1e-16 noise to 1e-8
    w = np.where(w < _RANK_FLOOR * max(w[0], 0.0), 0.0, w)
    lam = np.sqrt(w)
    value = lam[0] - lam[1:].sum()
    return ConcurrenceResult(float(min(max(value, 0.0), 1.0)), lam)


def concurrence(rho) -> float:
    return concurrence_mixed(rho).value


def concurrence_pure(psi, cut: int = 0) -> float:
    """sqrt(2 (1 - Tr rho_r^2)) with rho_r the reduced state of qubit ``cut``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise DimensionError("expected a two-qubit state vector of length 4")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("state vector is not normalised")
    reduced = partial_trace(np.outer(psi, psi.conj()), [2, 2], keep=[cut])
    purity = float(np.trace(reduced @ reduced).real)
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - purity))))
