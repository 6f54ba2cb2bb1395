"""States, channels, projective observables and thermal states."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matcore import DimensionError, as_matrix, dagger, herm_eig, kron

__all__ = [
    "INF",
    "I2",
    "SX",
    "SY",
    "SZ",
    "KET_0",
    "KET_1",
    "KET_PLUS",
    "KET_MINUS",
    "InvalidChannelError",
    "InvalidStateError",
    "DensityMatrix",
    "UnnormalizedOperator",
    "KrausChannel",
    "ProjectorSet",
    "projector",
    "embed",
    "identity_channel",
    "apply_channel",
    "dephase",
    "monitoring_channel",
    "gibbs_state",
    "f_thermal",
    "mub_qubit_bases",
    "trace_distance",
]

#: Inverse temperature of a zero-temperature bath.
INF = math.inf

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)

STATE_TOL = 1e-10
CHANNEL_TOL = 1e-10
PROJECTOR_TOL = 1e-12


class InvalidChannelError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


def _min_eig_ok(m: np.ndarray, tol: float) -> bool:
    # Cholesky of m + tol*I succeeds iff every eigenvalue of m exceeds -tol.
    try:
        np.linalg.cholesky(m + tol * np.eye(m.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


def _hermitian_part(m: np.ndarray, what: type) -> np.ndarray:
    if np.abs(m - dagger(m)).max() > STATE_TOL:
        raise what("operator is not Hermitian")
    return 0.5 * (m + dagger(m))


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(ket, ket.conj())


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state with subsystem dimension tags.

    ``dims`` defaults to a single system spanning the whole matrix.
    """

    mat: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = as_matrix(self.mat, square=True)
        dims = tuple(int(d) for d in self.dims) or (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionError(f"dims {dims} do not match matrix size {m.shape[0]}")
        m = _hermitian_part(m, InvalidStateError)
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        if not _min_eig_ok(m, STATE_TOL):
            raise InvalidStateError("state has a negative eigenvalue below -1e-10")
        object.__setattr__(self, "mat", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def pure(cls, psi, dims: Sequence[int] = ()) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(projector(psi / np.linalg.norm(psi)), tuple(dims))

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, tuple(dims))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class UnnormalizedOperator:
    """Positive operator with trace <= 1, e.g. one post-selected branch."""

    mat: np.ndarray

    def __post_init__(self):
        m = _hermitian_part(as_matrix(self.mat, square=True), InvalidStateError)
        if not _min_eig_ok(m, STATE_TOL):
            raise InvalidStateError("operator has a negative eigenvalue below -1e-10")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def weight(self) -> float:
        return float(np.trace(self.mat).real)


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by Kraus operators; completeness is checked on construction."""

    kraus: tuple[np.ndarray, ...]
    label: str = ""

    def __post_init__(self):
        ops = tuple(_frozen(as_matrix(k, square=True)) for k in self.kraus)
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise InvalidChannelError("Kraus operators must share one square shape")
        total = sum(dagger(k) @ k for k in ops)
        err = np.abs(total - np.eye(d)).max()
        if err > CHANNEL_TOL:
            raise InvalidChannelError(f"completeness violated by {err:.3e} ({self.label or 'unnamed'})")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self):
        return len(self.kraus)


@dataclass(frozen=True)
class ProjectorSet:
    """Complete set of orthogonal projectors defining a non-degenerate or degenerate observable."""

    projectors: tuple[np.ndarray, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        ps = tuple(_frozen(as_matrix(p, square=True)) for p in self.projectors)
        labels = tuple(self.labels) or tuple(str(i) for i in range(len(ps)))
        if len(labels) != len(ps):
            raise ValueError("one label per projector required")
        d = ps[0].shape[0]
        for a, pa in enumerate(ps):
            for b, pb in enumerate(ps):
                want = pa if a == b else np.zeros((d, d))
                if np.abs(pa @ pb - want).max() > PROJECTOR_TOL:
                    raise ValueError(f"projectors {labels[a]!r} and {labels[b]!r} are not orthogonal projectors")
        if np.abs(sum(ps) - np.eye(d)).max() > PROJECTOR_TOL:
            raise ValueError("projectors do not sum to the identity")
        object.__setattr__(self, "projectors", ps)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


def embed(op, subsystem: int, dims: Sequence[int]) -> np.ndarray:
    """Place ``op`` on one tensor factor, identities on the rest."""
    op = as_matrix(op, square=True)
    if not 0 <= subsystem < len(dims):
        raise DimensionError(f"subsystem {subsystem} out of range for dims {tuple(dims)}")
    if op.shape[0] != dims[subsystem]:
        raise DimensionError(f"operator of size {op.shape[0]} cannot act on a {dims[subsystem]}-dim subsystem")
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(dims):
        out = kron(out, op if i == subsystem else np.eye(d))
    return out


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),), label="identity")


def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    if ch.dim != rho.dim:
        raise DimensionError(f"channel acts on dim {ch.dim}, state has dim {rho.dim}")
    out = sum(k @ rho.mat @ dagger(k) for k in ch.kraus)
    return DensityMatrix(out, rho.dims)


def dephase(rho: DensityMatrix, obs: ProjectorSet, subsystem: int = 0) -> DensityMatrix:
    """Non-selective projective measurement of ``obs`` on one subsystem."""
    ops = [embed(p, subsystem, rho.dims) for p in obs.projectors]
    return DensityMatrix(sum(o @ rho.mat @ o for o in ops), rho.dims)


def monitoring_channel(obs: ProjectorSet, epsilon: float, subsystem: int, total_dims: Sequence[int]) -> KrausChannel:
    """Kraus form of ``(1 - eps) rho + eps * dephase(rho)``.

    ``epsilon = 0`` is no measurement, ``epsilon = 1`` a strong non-selective one.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"monitoring strength must lie in [0, 1], got {epsilon}")
    d = int(np.prod(total_dims))
    kraus = [np.sqrt(1.0 - epsilon) * np.eye(d)]
    kraus += [np.sqrt(epsilon) * embed(p, subsystem, total_dims) for p in obs.projectors]
    return KrausChannel(tuple(kraus), label=f"monitor[{','.join(obs.labels)}]@{subsystem} eps={epsilon:g}")


def gibbs_state(h, beta: float) -> DensityMatrix:
    """exp(-beta h) / Z.  ``beta = INF`` gives the uniform mixture over the ground space."""
    h = as_matrix(h, square=True)
    if beta < 0 or math.isnan(beta):
        raise ValueError(f"inverse temperature must be >= 0, got {beta}")
    w, v = herm_eig(h)
    if math.isinf(beta):
        ground = np.abs(w - w[-1]) <= 1e-12 * max(1.0, abs(w[-1]))
        pops = ground.astype(float)
    else:
        pops = np.exp(-beta * (w - w[-1]))
    pops = pops / pops.sum()
    return DensityMatrix((v * pops) @ dagger(v))


def f_thermal(beta: float, omega: float) -> float:
    """Thermal polarisation tanh(beta * omega / 2) of a qubit with gap omega."""
    if math.isinf(beta):
        return 1.0
    return math.tanh(beta * omega / 2.0)


def mub_qubit_bases() -> tuple[ProjectorSet, ProjectorSet]:
    """The sigma_z and sigma_x eigenbases of a qubit."""
    z = ProjectorSet((projector(KET_0), projector(KET_1)), ("0", "1"))
    x = ProjectorSet((projector(KET_PLUS), projector(KET_MINUS)), ("+", "-"))
    return z, x


def trace_distance(a, b) -> float:
    a = getattr(a, "mat", a)
    b = getattr(b, "mat", b)
    w, _ = herm_eig(np.asarray(a) - np.asarray(b))
    return 0.5 * float(np.abs(w).sum())
