"""Thermal collisional environment acting on the switch control.

Between the switch and the control measurement, the control meets a stream of
fresh thermal ancilla qubits, one per collision of duration ``tau``.  Two
independent routes give the state after ``n`` collisions:

* :func:`collide_once` simulates target + control + ancilla with the full
  unitary and traces the ancilla out, one collision at a time;
* :func:`analytic_after_n` assembles the state from the switch blocks and
  scalar decay coefficients.

The coupling is an energy-conserving partial swap, so the closed form is exact
for any ``g * tau``, not only to leading order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matcore import DimensionError, as_matrix, dagger, kron, partial_trace, unitary_from_hamiltonian
from .quantum import I2, KET_MINUS, KET_PLUS, SX, SY, SZ, DensityMatrix, f_thermal, gibbs_state, projector, trace_distance
from .switch import PROB_FLOOR, PostSelection, SwitchOutput, project_control

__all__ = [
    "CollisionParams",
    "AnalyticCoeffs",
    "control_hamiltonian",
    "interaction_hamiltonian",
    "collision_unitary",
    "analytic_coeffs",
    "collide_once",
    "collide",
    "bruteforce_after_n",
    "analytic_after_n",
    "postselect_after_n",
    "asymptotic_state",
    "oracle_gap",
]

_PP = projector(KET_PLUS)
_MM = projector(KET_MINUS)
_PM = np.outer(KET_PLUS, KET_MINUS.conj())
_MP = np.outer(KET_MINUS, KET_PLUS.conj())


@dataclass(frozen=True)
class CollisionParams:
    g: float
    tau: float
    omega: float
    beta_e: float
    h_s: np.ndarray

    def __post_init__(self):
        h = as_matrix(self.h_s, square=True)
        if np.abs(h - dagger(h)).max() > 1e-12:
            raise ValueError("target Hamiltonian must be Hermitian")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if math.isnan(self.beta_e) or self.beta_e < 0:
            raise ValueError(f"beta_e must be >= 0 or INF, got {self.beta_e}")
        if self.tau < 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        h = np.array(h)
        h.setflags(write=False)
        object.__setattr__(self, "h_s", h)

    @property
    def g_tau(self) -> float:
        return self.g * self.tau

    @property
    def f_e(self) -> float:
        return f_thermal(self.beta_e, self.omega)

    @property
    def target_dim(self) -> int:
        return self.h_s.shape[0]

    def target_unitary(self) -> np.ndarray:
        return _target_unitary(self.h_s.tobytes(), self.h_s.shape[0], self.tau)


@dataclass(frozen=True)
class AnalyticCoeffs:
    n: int
    b_def_plus: float
    b_def_minus: float
    b_indef_plus: float
    b_indef_minus: float
    coherence_factor: complex


def control_hamiltonian(omega: float) -> np.ndarray:
    """H_C = H_E = -omega sigma_x / 2, diagonal in the post-selection basis."""
    return -0.5 * omega * SX


def interaction_hamiltonian(g: float) -> np.ndarray:
    """(g/2)(sz sz + sy sy) on control (x) ancilla."""
    return 0.5 * g * (kron(SZ, SZ) + kron(SY, SY))


@lru_cache(maxsize=64)
def _target_unitary(h_bytes: bytes, d: int, tau: float) -> np.ndarray:
    h = np.frombuffer(h_bytes, dtype=complex).reshape(d, d)
    u = unitary_from_hamiltonian(h, tau)
    u.setflags(write=False)
    return u


@lru_cache(maxsize=64)
def _collision_unitary(h_bytes: bytes, d: int, g: float, tau: float, omega: float) -> np.ndarray:
    h_s = np.frombuffer(h_bytes, dtype=complex).reshape(d, d)
    h_ce = kron(control_hamiltonian(omega), I2) + kron(I2, control_hamiltonian(omega)) + interaction_hamiltonian(g)
    h_tot = kron(h_s, np.eye(4)) + kron(np.eye(d), h_ce)
    u = unitary_from_hamiltonian(h_tot, tau)
    u.setflags(write=False)
    return u


def collision_unitary(p: CollisionParams) -> np.ndarray:
    """exp(-i tau (H_S + H_C + H_E + V_CE)) on target (x) control (x) ancilla."""
    return _collision_unitary(p.h_s.tobytes(), p.target_dim, float(p.g), float(p.tau), float(p.omega))


def analytic_coeffs(n: int, p: CollisionParams) -> AnalyticCoeffs:
    if n < 0:
        raise ValueError("collision count must be >= 0")
    c = math.cos(p.g_tau)
    c2n = c ** (2 * n)
    f = p.f_e
    return AnalyticCoeffs(
        n=n,
        b_def_plus=1.0 + f * (1.0 - c2n),
        b_def_minus=1.0 - f * (1.0 - c2n),
        b_indef_plus=c2n,
        b_indef_minus=-c2n,
        coherence_factor=np.exp(1j * n * p.tau * p.omega) * c**n,
    )


def collide_once(rho_sc: DensityMatrix, p: CollisionParams) -> DensityMatrix:
    d = p.target_dim
    if rho_sc.dim != 2 * d:
        raise DimensionError(f"state of dim {rho_sc.dim} does not match target dim {d} times a qubit control")
    theta = gibbs_state(control_hamiltonian(p.omega), p.beta_e)
    u = collision_unitary(p)
    big = u @ kron(rho_sc.mat, theta.mat) @ dagger(u)
    return DensityMatrix(partial_trace(big, [d, 2, 2], keep=[0, 1]), rho_sc.dims)


def collide(rho_sc: DensityMatrix, p: CollisionParams, n: int) -> list[DensityMatrix]:
    """States after 0, 1, ..., n collisions."""
    out = [rho_sc]
    for _ in range(n):
        out.append(collide_once(out[-1], p))
    return out


def bruteforce_after_n(sw: SwitchOutput, n: int, p: CollisionParams) -> DensityMatrix:
    return collide(sw.joint, p, n)[-1]


def _conj(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    return u @ a @ dagger(u)


def analytic_after_n(sw: SwitchOutput, n: int, p: CollisionParams) -> DensityMatrix:
    """Closed-form target+control state after ``n`` collisions.

    Requires a switch run with the control prepared in |+>.
    """
    if sw.a_pp is None:
        raise ValueError("closed form needs the switch blocks of a |+> control")
    if sw.target_dim != p.target_dim:
        raise DimensionError("switch target and Hamiltonian dimensions differ")
    k = analytic_coeffs(n, p)
    un = np.linalg.matrix_power(p.target_unitary(), n)
    a_def = _conj(un, sw.a_def.mat)
    a_indef = _conj(un, sw.a_indef)
    b_pp = 0.5 * k.b_def_plus * a_def + 0.5 * k.b_indef_plus * a_indef
    b_mm = 0.5 * k.b_def_minus * a_def + 0.5 * k.b_indef_minus * a_indef
    b_pm = k.coherence_factor * _conj(un, sw.a_pm)
    joint = kron(b_pp, _PP) + kron(b_pm, _PM) + kron(dagger(b_pm), _MP) + kron(b_mm, _MM)
    return DensityMatrix(joint, sw.joint.dims)


def postselect_after_n(state_n: DensityMatrix, outcome: str) -> PostSelection:
    block = project_control(state_n, outcome)
    p = float(np.trace(block).real)
    if p <= PROB_FLOOR:
        return PostSelection(outcome, max(p, 0.0), None)
    return PostSelection(outcome, min(p, 1.0), DensityMatrix(block / p, state_n.dims[:-1]))


def asymptotic_state(sw: SwitchOutput, p: CollisionParams, n: int = 0) -> DensityMatrix:
    """Infinitely-many-collision limit, written in the frame of ``n`` free steps.

    The limit itself only exists up to the free target rotation U_S^n, so the
    caller picks which frame to compare in.
    """
    un = np.linalg.matrix_power(p.target_unitary(), n)
    rho_s = _conj(un, sw.a_def.mat)
    theta = gibbs_state(control_hamiltonian(p.omega), p.beta_e)
    return DensityMatrix(kron(rho_s, theta.mat), sw.joint.dims)


def oracle_gap(sw: SwitchOutput, p: CollisionParams, max_n: int) -> float:
    """Largest trace distance between the two routes over n = 0..max_n."""
    chain = collide(sw.joint, p, max_n)
    return max(trace_distance(chain[n], analytic_after_n(sw, n, p)) for n in range(max_n + 1))
