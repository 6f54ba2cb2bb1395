import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from openswitch.matcore import DimensionError, kron, partial_trace
from openswitch.quantum import (
    INF,
    KET_PLUS,
    SX,
    DensityMatrix,
    InvalidChannelError,
    InvalidStateError,
    KrausChannel,
    ProjectorSet,
    apply_channel,
    dephase,
    f_thermal,
    gibbs_state,
    identity_channel,
    monitoring_channel,
    mub_qubit_bases,
    projector,
)

from randomness import random_channel, random_density

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
Z, X = mub_qubit_bases()


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.eye(2))  # trace 2
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.3], [0.1, 0.5]]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.1, -0.1]))
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(4) / 4, (2, 3))
    rho = DensityMatrix(np.eye(4) / 4, (2, 2))
    assert not rho.mat.flags.writeable


def test_channel_completeness_checked():
    with pytest.raises(InvalidChannelError):
        KrausChannel((0.9 * np.eye(2),))


def test_identity_channel():
    rho = DensityMatrix.pure(BELL, (2, 2))
    out = apply_channel(identity_channel(4), rho)
    assert np.array_equal(out.mat, rho.mat)


def test_full_z_dephasing_of_plus():
    ch = monitoring_channel(Z, 1.0, 0, (2,))
    out = apply_channel(ch, DensityMatrix.pure(KET_PLUS))
    assert np.abs(out.mat - np.eye(2) / 2).max() <= 1e-15


def test_random_channels_preserve_trace_and_hermiticity(rng):
    for _ in range(100):
        d = int(rng.integers(2, 5))
        ch = random_channel(rng, d, int(rng.integers(1, 4)))
        out = apply_channel(ch, random_density(rng, d))
        assert abs(np.trace(out.mat) - 1) <= 1e-11
        assert np.abs(out.mat - out.mat.conj().T).max() <= 1e-11


def test_apply_channel_dimension_mismatch(rng):
    with pytest.raises(DimensionError):
        apply_channel(identity_channel(2), random_density(rng, 4))


def test_dephase_bell_in_z():
    out = dephase(DensityMatrix.pure(BELL, (2, 2)), Z, 0)
    assert np.abs(out.mat - np.diag([0.5, 0, 0, 0.5])).max() <= 1e-15


def test_dephase_idempotent(rng):
    rho = random_density(rng, 4, (2, 2))
    once = dephase(rho, X, 0)
    assert np.abs(dephase(once, X, 0).mat - once.mat).max() <= 1e-13


def test_dephase_matches_outcome_decomposition(rng):
    # sum_a p_a O_a (x) rho_{B|a}
    rho = random_density(rng, 4, (2, 2))
    want = np.zeros((4, 4), dtype=complex)
    for proj in X.projectors:
        block = kron(proj, np.eye(2)) @ rho.mat @ kron(proj, np.eye(2))
        p = np.trace(block).real
        rho_b = partial_trace(block, [2, 2], {1}) / p
        want += p * kron(proj, rho_b)
    assert np.abs(dephase(rho, X, 0).mat - want).max() <= 1e-12


def test_dephase_on_second_subsystem(rng):
    rho = random_density(rng, 4, (2, 2))
    out = dephase(rho, Z, 1)
    want = sum(kron(np.eye(2), p) @ rho.mat @ kron(np.eye(2), p) for p in Z.projectors)
    assert np.abs(out.mat - want).max() <= 1e-15


def test_monitoring_endpoints(rng):
    rho = random_density(rng, 4, (2, 2))
    assert np.abs(apply_channel(monitoring_channel(Z, 0.0, 0, (2, 2)), rho).mat - rho.mat).max() <= 1e-15
    strong = apply_channel(monitoring_channel(Z, 1.0, 0, (2, 2)), rho)
    assert np.abs(strong.mat - dephase(rho, Z, 0).mat).max() <= 1e-15


def test_monitoring_convex_combination():
    rho = DensityMatrix.pure(BELL, (2, 2))
    out = apply_channel(monitoring_channel(X, 0.3, 0, (2, 2)), rho)
    want = 0.7 * rho.mat + 0.3 * dephase(rho, X, 0).mat
    assert np.abs(out.mat - want).max() <= 1e-13


def test_monitoring_kraus_form():
    ch = monitoring_channel(Z, 0.4, 0, (2, 2))
    assert len(ch) == 3
    assert np.abs(ch.kraus[0] - np.sqrt(0.6) * np.eye(4)).max() == 0
    assert np.abs(ch.kraus[1] - np.sqrt(0.4) * np.diag([1, 1, 0, 0])).max() <= 1e-16


def test_monitoring_strength_range():
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            monitoring_channel(Z, bad, 0, (2, 2))


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0, 1),
    st.floats(0, 1),
    st.sampled_from(["z", "x"]),
    st.integers(0, 2**32 - 1),
)
def test_monitoring_composition(e1, e2, basis, seed):
    obs = Z if basis == "z" else X
    rho = random_density(np.random.default_rng(seed), 4, (2, 2))
    twice = apply_channel(monitoring_channel(obs, e2, 0, (2, 2)), apply_channel(monitoring_channel(obs, e1, 0, (2, 2)), rho))
    once = apply_channel(monitoring_channel(obs, e1 + e2 - e1 * e2, 0, (2, 2)), rho)
    assert np.abs(twice.mat - once.mat).max() <= 1e-12


def test_gibbs_infinite_temperature():
    assert np.abs(gibbs_state(-0.5 * SX, 0.0).mat - np.eye(2) / 2).max() <= 1e-15


def test_gibbs_zero_temperature_is_plus():
    assert np.abs(gibbs_state(-0.5 * SX, INF).mat - projector(KET_PLUS)).max() <= 1e-15


def test_gibbs_zero_temperature_degenerate():
    h = np.diag([0.0, 0.0, 1.0])
    assert np.abs(gibbs_state(h, INF).mat - np.diag([0.5, 0.5, 0])).max() <= 1e-15


def test_gibbs_populations_beta_two():
    theta = gibbs_state(-0.5 * SX, 2.0)
    p_plus = np.vdot(KET_PLUS, theta.mat @ KET_PLUS).real
    assert abs(p_plus - math.e / (math.e + 1 / math.e)) <= 1e-14
    assert abs(p_plus - 0.8808) < 1e-4


def test_gibbs_commutes_with_hamiltonian(rng):
    from randomness import random_hermitian

    h = random_hermitian(rng, 4)
    theta = gibbs_state(h, 1.3)
    assert abs(np.trace(theta.mat) - 1) <= 1e-11
    assert np.abs(theta.mat @ h - h @ theta.mat).max() <= 1e-11


def test_f_thermal():
    assert f_thermal(0.0, 1.0) == 0.0
    assert f_thermal(INF, 1.0) == 1.0
    assert abs(f_thermal(2.0, 1.0) - math.tanh(1.0)) <= 1e-15
    assert abs(f_thermal(2.0, 1.0) - 0.76159) < 1e-5


def test_mub_bases():
    for zp in Z.projectors:
        for xp in X.projectors:
            assert abs(np.trace(zp @ xp).real - 0.5) <= 1e-15
    assert Z.labels == ("0", "1") and X.labels == ("+", "-")


def test_projector_set_validation():
    with pytest.raises(ValueError):
        ProjectorSet((np.diag([1.0, 0.0]), np.diag([1.0, 0.0])))
    with pytest.raises(ValueError):
        ProjectorSet((np.diag([1.0, 0.0]),))
