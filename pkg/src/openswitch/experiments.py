"""Bell pair through a switch of two mutually unbiased monitorings, with open control.

The target is a two-qubit pair AB prepared in (|00> + |11>)/sqrt(2).  Both
switched maps monitor qubit A with the same strength ``epsilon``: one in the
sigma_z basis, one in the sigma_x basis.  After the switch the control
undergoes ``n`` thermal collisions and is then post-selected on |+> or |->.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .entanglement import concurrence
from .matcore import kron, partial_trace
from .opencontrol import (
    CollisionParams,
    analytic_after_n,
    collide,
    postselect_after_n,
)
from .quantum import I2, SZ, DensityMatrix, ProjectorSet, monitoring_channel, mub_qubit_bases
from .switch import OUTCOMES, SwitchOutput, run_switch

__all__ = [
    "TAU",
    "ENGINES",
    "BELL_PHI",
    "SINGLET",
    "ConfigError",
    "EpsilonGrid",
    "ScenarioConfig",
    "SweepRecord",
    "SuddenDeath",
    "bell_state",
    "pair_hamiltonian",
    "make_params",
    "bell_mub_switch",
    "reference_a_pp",
    "reference_a_mm",
    "reference_a_sum",
    "reference_a_diff",
    "definite_baseline",
    "open_control_record",
    "run_sweep",
    "engine_discrepancy",
    "sudden_death_threshold",
]

#: Collision duration.  Concurrences do not depend on it once g*tau is fixed.
TAU = 1.0
ENGINES = ("analytic", "bruteforce")
DEAD = 1e-12

BELL_PHI = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
# (|10> - |01>)/sqrt(2)
SINGLET = np.array([0, -1, 1, 0], dtype=complex) / np.sqrt(2)


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def bell_state() -> DensityMatrix:
    return DensityMatrix.pure(BELL_PHI, (2, 2))


def pair_hamiltonian(omega_s: float = 1.0) -> np.ndarray:
    """omega_s (sz (x) 1 + 1 (x) sz), free Hamiltonian of the pair."""
    return omega_s * (kron(SZ, I2) + kron(I2, SZ))


def make_params(beta: float, g_tau: float = 0.2, omega: float = 1.0, omega_s: float = 1.0) -> CollisionParams:
    return CollisionParams(g=g_tau / TAU, tau=TAU, omega=omega, beta_e=beta, h_s=pair_hamiltonian(omega_s))


def bell_mub_switch(epsilon: float, bases: Optional[tuple[ProjectorSet, ProjectorSet]] = None) -> SwitchOutput:
    """Switch of z- and x-monitoring on qubit A, acting on the Bell pair.

    ``bases`` replaces the (z, x) pair, e.g. to feed a deliberately biased basis.
    """
    z, x = bases if bases is not None else mub_qubit_bases()
    m_ch = monitoring_channel(z, epsilon, 0, (2, 2))
    n_ch = monitoring_channel(x, epsilon, 0, (2, 2))
    return run_switch(m_ch, n_ch, bell_state())


# Closed-form blocks for the Bell pair, basis order |00>, |01>, |10>, |11>.

def reference_a_pp(eps: float) -> np.ndarray:
    corner = (eps - 2) * (eps - 1)
    mid = -0.5 * (eps - 2) * eps
    return 0.25 * np.array(
        [
            [2 - eps, 0, 0, corner],
            [0, mid, mid, 0],
            [0, mid, mid, 0],
            [corner, 0, 0, 2 - eps],
        ],
        dtype=complex,
    )


def reference_a_mm(eps: float) -> np.ndarray:
    e2 = eps * eps
    return 0.125 * np.array(
        [[0, 0, 0, 0], [0, e2, -e2, 0], [0, -e2, e2, 0], [0, 0, 0, 0]],
        dtype=complex,
    )


def reference_a_sum(eps: float) -> np.ndarray:
    corner = (eps - 2) * (eps - 1)
    return 0.25 * np.array(
        [
            [2 - eps, 0, 0, corner],
            [0, eps, eps * (1 - eps), 0],
            [0, eps * (1 - eps), eps, 0],
            [corner, 0, 0, 2 - eps],
        ],
        dtype=complex,
    )


def reference_a_diff(eps: float) -> np.ndarray:
    corner = (eps - 2) * (eps - 1)
    return 0.25 * np.array(
        [
            [2 - eps, 0, 0, corner],
            [0, eps * (1 - eps), eps, 0],
            [0, eps, eps * (1 - eps), 0],
            [corner, 0, 0, 2 - eps],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class EpsilonGrid:
    min: float = 0.0
    max: float = 1.0
    steps: int = 201

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class ScenarioConfig:
    epsilon: EpsilonGrid = field(default_factory=EpsilonGrid)
    collision_counts: tuple[int, ...] = (0, 1, 2, 3, 5, 10, 20, 50)
    betas: tuple[float, ...] = (0.1, 5.0)
    g_tau: float = 0.2
    omega: float = 1.0
    omega_s: float = 1.0
    postselections: tuple[str, ...] = OUTCOMES
    include_definite_baseline: bool = True
    engine: str = "analytic"

    def __post_init__(self):
        grid = self.epsilon
        if not (0.0 <= grid.min <= 1.0 and 0.0 <= grid.max <= 1.0):
            raise ConfigError("epsilon", "min and max must lie in [0, 1]")
        if not grid.min < grid.max:
            raise ConfigError("epsilon", f"min ({grid.min}) must be below max ({grid.max})")
        if isinstance(grid.steps, bool) or not isinstance(grid.steps, int) or grid.steps < 2:
            raise ConfigError("epsilon.steps", "must be an integer >= 2")
        if not self.collision_counts:
            raise ConfigError("collision_counts", "must not be empty")
        if any(isinstance(n, bool) or not isinstance(n, int) or n < 0 for n in self.collision_counts):
            raise ConfigError("collision_counts", "entries must be non-negative integers")
        if not self.betas:
            raise ConfigError("betas", "must not be empty")
        if any(math.isnan(b) or b < 0 for b in self.betas):
            raise ConfigError("betas", "entries must be >= 0 or inf")
        if not 0.0 < self.g_tau < math.pi / 2:
            raise ConfigError("g_tau", "must lie in (0, pi/2)")
        if not self.omega > 0:
            raise ConfigError("omega", "must be > 0")
        if not (self.omega_s >= 0 and math.isfinite(self.omega_s)):
            raise ConfigError("omega_s", "must be finite and >= 0")
        if not self.postselections or any(o not in OUTCOMES for o in self.postselections):
            raise ConfigError("postselections", f"must be a non-empty subset of {list(OUTCOMES)}")
        if len(set(self.postselections)) != len(self.postselections):
            raise ConfigError("postselections", "duplicate entries")
        if self.engine not in ENGINES + ("both",):
            raise ConfigError("engine", "must be one of analytic, bruteforce, both")

    @property
    def engines(self) -> tuple[str, ...]:
        return ENGINES if self.engine == "both" else (self.engine,)

    def params(self, beta: float) -> CollisionParams:
        return make_params(beta, self.g_tau, self.omega, self.omega_s)


@dataclass(frozen=True)
class SweepRecord:
    epsilon: float
    n: int
    beta: float
    postselect: str  # "plus", "minus" or "definite"
    p_post: float
    concurrence: Optional[float]  # None when the branch has zero probability
    engine: str


def _check_engine(engine: str):
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")


def _state_after(sw: SwitchOutput, n: int, params: CollisionParams, engine: str) -> DensityMatrix:
    _check_engine(engine)
    if engine == "analytic":
        return analytic_after_n(sw, n, params)
    return collide(sw.joint, params, n)[-1]


def _definite_state(sw: SwitchOutput, n: int, params: CollisionParams, state_n: Optional[DensityMatrix]) -> DensityMatrix:
    """Order-mixed pair state after n steps.

    With ``state_n`` (a brute-force target+control state) the control is traced
    out; without it A_def is rotated by the free evolution directly.
    """
    if state_n is None:
        un = np.linalg.matrix_power(params.target_unitary(), n)
        rho = un @ sw.a_def.mat @ un.conj().T
    else:
        rho = partial_trace(state_n.mat, state_n.dims, keep=range(len(state_n.dims) - 1))
    return DensityMatrix(rho / np.trace(rho).real, sw.joint.dims[:-1])


def definite_baseline(
    epsilon: float,
    n: int,
    params: CollisionParams,
    engine: str = "analytic",
    sw: Optional[SwitchOutput] = None,
) -> SweepRecord:
    """Both monitorings in a classical mixture of the two orders (control ignored).

    The result does not depend on ``n`` because the free evolution is local.
    """
    _check_engine(engine)
    sw = sw if sw is not None else bell_mub_switch(epsilon)
    state_n = None if engine == "analytic" else collide(sw.joint, params, n)[-1]
    rho = _definite_state(sw, n, params, state_n)
    return SweepRecord(float(epsilon), n, params.beta_e, "definite", 1.0, concurrence(rho), engine)


def open_control_record(
    epsilon: float,
    n: int,
    beta: float,
    outcome: str,
    params: CollisionParams,
    engine: str = "analytic",
    sw: Optional[SwitchOutput] = None,
) -> SweepRecord:
    """Concurrence of the pair post-selected on ``outcome`` after ``n`` collisions.

    ``beta`` overrides ``params.beta_e``.  A vanishing branch gets
    ``concurrence=None``.
    """
    params = replace(params, beta_e=beta)
    sw = sw if sw is not None else bell_mub_switch(epsilon)
    post = postselect_after_n(_state_after(sw, n, params, engine), outcome)
    conc = concurrence(post.conditional) if post.defined else None
    return SweepRecord(float(epsilon), n, beta, outcome, post.probability, conc, engine)


def run_sweep(cfg: ScenarioConfig) -> list[SweepRecord]:
    """Evaluate every grid point.

    Row order: epsilon, then n, then beta, then outcome (post-selections in
    configured order followed by ``definite``), then engine.
    """
    counts = list(cfg.collision_counts)
    n_max = max(counts)
    records = []
    for eps in cfg.epsilon.values():
        eps = float(eps)
        sw = bell_mub_switch(eps)
        states = {}
        for beta in cfg.betas:
            params = cfg.params(beta)
            if "bruteforce" in cfg.engines:
                chain = collide(sw.joint, params, n_max)
                states[beta, "bruteforce"] = {n: chain[n] for n in counts}
            if "analytic" in cfg.engines:
                states[beta, "analytic"] = {n: analytic_after_n(sw, n, params) for n in counts}
        for n in counts:
            for beta in cfg.betas:
                params = cfg.params(beta)
                for outcome in cfg.postselections:
                    for engine in cfg.engines:
                        post = postselect_after_n(states[beta, engine][n], outcome)
                        conc = concurrence(post.conditional) if post.defined else None
                        records.append(SweepRecord(eps, n, beta, outcome, post.probability, conc, engine))
                if cfg.include_definite_baseline:
                    for engine in cfg.engines:
                        state_n = None if engine == "analytic" else states[beta, engine][n]
                        rho = _definite_state(sw, n, params, state_n)
                        records.append(SweepRecord(eps, n, beta, "definite", 1.0, concurrence(rho), engine))
    return records


def engine_discrepancy(records: Iterable[SweepRecord]) -> float:
    """Largest |concurrence difference| between matching analytic and brute-force rows."""
    rows = {}
    for r in records:
        rows.setdefault((r.epsilon, r.n, r.beta, r.postselect), {})[r.engine] = r.concurrence
    worst = 0.0
    for by_engine in rows.values():
        if len(by_engine) < 2:
            continue
        a, b = by_engine["analytic"], by_engine["bruteforce"]
        if (a is None) != (b is None):
            return math.inf
        if a is not None:
            worst = max(worst, abs(a - b))
    return worst


class SuddenDeath(NamedTuple):
    bracket: tuple[float, float]  # last alive grid point, first dead grid point
    epsilon_star: float  # bisection estimate inside the bracket


def sudden_death_threshold(
    conc: Callable[[float], Optional[float]],
    grid: Sequence[float],
    tol: float = 1e-6,
) -> Optional[SuddenDeath]:
    """First grid point where ``conc`` reaches zero after being positive, refined by bisection.

    Returns None if the curve never dies on the grid.
    """
    grid = [float(e) for e in grid]
    values = [conc(e) for e in grid]
    for i in range(1, len(grid)):
        prev, cur = values[i - 1], values[i]
        if prev is not None and prev > DEAD and cur is not None and cur <= DEAD:
            lo, hi = grid[i - 1], grid[i]
            a, b = lo, hi
            while b - a > tol:
                mid = 0.5 * (a + b)
                c = conc(mid)
                if c is not None and c > DEAD:
                    a = mid
                else:
                    b = mid
            return SuddenDeath((lo, hi), 0.5 * (a + b))
    return None
