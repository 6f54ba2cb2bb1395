"""Two-map quantum switch with a qubit control.

Tensor order is always (target, control): the control is the last factor and
post-selection happens in its {|+>, |->} basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .matcore import DimensionError, as_matrix, dagger, kron
from .quantum import (
    KET_MINUS,
    KET_PLUS,
    DensityMatrix,
    KrausChannel,
    UnnormalizedOperator,
    projector,
)

__all__ = [
    "OUTCOMES",
    "PROB_FLOOR",
    "SwitchOutput",
    "PostSelection",
    "controlled_kraus",
    "run_switch",
    "postselect",
    "project_control",
]

OUTCOMES = ("plus", "minus")
#: Branches with probability at or below this have no conditional state.
PROB_FLOOR = 1e-12

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_CONTROL_KETS = {"plus": KET_PLUS, "minus": KET_MINUS}
_PLUS_STATE = projector(KET_PLUS)


@dataclass(frozen=True)
class SwitchOutput:
    """Result of one switch application.

    The operator blocks are only filled in for the control prepared in |+>;
    for any other control state they are ``None`` and only ``joint`` is set.
    """

    joint: DensityMatrix
    a_def: Optional[UnnormalizedOperator] = None
    a_indef: Optional[np.ndarray] = None
    a_pp: Optional[UnnormalizedOperator] = None
    a_mm: Optional[UnnormalizedOperator] = None
    a_pm: Optional[np.ndarray] = None

    @property
    def target_dim(self) -> int:
        return self.joint.dim // 2

    @property
    def a_mp(self) -> np.ndarray:
        return dagger(self.a_pm)

    def block(self, x: str, y: str) -> np.ndarray:
        """Operator multiplying |x><y| on the control, x, y in {'+', '-'}."""
        table = {
            ("+", "+"): self.a_pp.mat,
            ("+", "-"): self.a_pm,
            ("-", "+"): self.a_mp,
            ("-", "-"): self.a_mm.mat,
        }
        return table[(x, y)]


@dataclass(frozen=True)
class PostSelection:
    outcome: str
    probability: float
    conditional: Optional[DensityMatrix]

    @property
    def defined(self) -> bool:
        return self.conditional is not None


def controlled_kraus(m, n) -> np.ndarray:
    """W = (m n) (x) |0><0| + (n m) (x) |1><1|."""
    m = as_matrix(m, square=True)
    n = as_matrix(n, square=True)
    if m.shape != n.shape:
        raise DimensionError(f"Kraus operators have shapes {m.shape} and {n.shape}")
    return kron(m @ n, _P0) + kron(n @ m, _P1)


def _check_pair(m_ch: KrausChannel, n_ch: KrausChannel, rho_s: DensityMatrix):
    if m_ch.dim != n_ch.dim:
        raise DimensionError(f"channels act on dims {m_ch.dim} and {n_ch.dim}")
    if rho_s.dim != m_ch.dim:
        raise DimensionError(f"target state has dim {rho_s.dim}, channels act on {m_ch.dim}")


def run_switch(
    m_ch: KrausChannel,
    n_ch: KrausChannel,
    rho_s: DensityMatrix,
    rho_c: Optional[DensityMatrix] = None,
) -> SwitchOutput:
    _check_pair(m_ch, n_ch, rho_s)
    plus_control = rho_c is None or np.abs(rho_c.mat - _PLUS_STATE).max() <= 1e-14
    if rho_c is None:
        rho_c = DensityMatrix(_PLUS_STATE)
    if rho_c.dim != 2:
        raise DimensionError("the control must be a qubit")

    rho_in = kron(rho_s.mat, rho_c.mat)
    joint = np.zeros_like(rho_in)
    for mi in m_ch.kraus:
        for nj in n_ch.kraus:
            w = controlled_kraus(mi, nj)
            joint += w @ rho_in @ dagger(w)
    joint = DensityMatrix(joint, tuple(rho_s.dims) + (2,))
    if not plus_control:
        return SwitchOutput(joint)

    rho = rho_s.mat
    d = rho.shape[0]
    a_def = np.zeros((d, d), dtype=complex)
    a_indef = np.zeros((d, d), dtype=complex)
    blocks = {key: np.zeros((d, d), dtype=complex) for key in ("++", "+-", "-+", "--")}
    for mi in m_ch.kraus:
        for nj in n_ch.kraus:
            mn = mi @ nj
            nm = nj @ mi
            a_def += mn @ rho @ dagger(mn) + nm @ rho @ dagger(nm)
            a_indef += mn @ rho @ dagger(nm) + nm @ rho @ dagger(mn)
            anti = {"+": mn + nm, "-": mn - nm}
            for key in blocks:
                blocks[key] += anti[key[0]] @ rho @ dagger(anti[key[1]])
    a_def *= 0.5
    a_indef *= 0.5
    for key in blocks:
        blocks[key] *= 0.25

    return SwitchOutput(
        joint=joint,
        a_def=UnnormalizedOperator(a_def),
        a_indef=0.5 * (a_indef + dagger(a_indef)),
        a_pp=UnnormalizedOperator(blocks["++"]),
        a_mm=UnnormalizedOperator(blocks["--"]),
        a_pm=blocks["+-"],
    )


def project_control(state: DensityMatrix, outcome: str) -> np.ndarray:
    """Unnormalised target block <x|_C state |x>_C for x = outcome."""
    if outcome not in _CONTROL_KETS:
        raise ValueError(f"outcome must be one of {OUTCOMES}, got {outcome!r}")
    if state.dims[-1] != 2:
        raise DimensionError("the last tensor factor must be the qubit control")
    d = state.dim // 2
    bra = kron(np.eye(d), _CONTROL_KETS[outcome].reshape(2, 1))
    return dagger(bra) @ state.mat @ bra


def _conditional(outcome: str, block: np.ndarray, dims) -> PostSelection:
    p = float(np.trace(block).real)
    if p <= PROB_FLOOR:
        return PostSelection(outcome, max(p, 0.0), None)
    return PostSelection(outcome, min(p, 1.0), DensityMatrix(block / p, dims))


def postselect(out: SwitchOutput, outcome: str) -> PostSelection:
    """Measure the control in {|+>, |->} and keep ``outcome``.

    A vanishing branch (p <= 1e-12) is returned with ``conditional=None``.
    """
    if outcome not in _CONTROL_KETS:
        raise ValueError(f"outcome must be one of {OUTCOMES}, got {outcome!r}")
    dims = out.joint.dims[:-1]
    if out.a_pp is None:
        return _conditional(outcome, project_control(out.joint, outcome), dims)
    block = out.a_pp.mat if outcome == "plus" else out.a_mm.mat
    return _conditional(outcome, block, dims)
