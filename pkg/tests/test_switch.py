import numpy as np
import pytest

from openswitch.matcore import DimensionError, kron
from openswitch.quantum import (
    KET_MINUS,
    KET_PLUS,
    SX,
    SY,
    SZ,
    DensityMatrix,
    KrausChannel,
    identity_channel,
    monitoring_channel,
    mub_qubit_bases,
    projector,
)
from openswitch.switch import controlled_kraus, postselect, project_control, run_switch

from randomness import random_channel, random_density

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0]) / np.sqrt(2)
Z, X = mub_qubit_bases()
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def bell_switch(eps):
    m = monitoring_channel(Z, eps, 0, (2, 2))
    n = monitoring_channel(X, eps, 0, (2, 2))
    return run_switch(m, n, DensityMatrix.pure(BELL, (2, 2)))


def test_controlled_kraus_identity():
    assert np.array_equal(controlled_kraus(np.eye(2), np.eye(2)), np.eye(4))


def test_controlled_kraus_sx_sz():
    w = controlled_kraus(SX, SZ)
    want = kron(-1j * SY, P0) + kron(1j * SY, P1)
    assert np.abs(w - want).max() <= 1e-15


def test_controlled_kraus_completeness(rng):
    m = random_channel(rng, 3, 2)
    n = random_channel(rng, 3, 3)
    total = sum(
        controlled_kraus(mi, nj).conj().T @ controlled_kraus(mi, nj) for mi in m.kraus for nj in n.kraus
    )
    assert np.abs(total - np.eye(6)).max() <= 1e-12


def test_controlled_kraus_shape_mismatch():
    with pytest.raises(DimensionError):
        controlled_kraus(np.eye(2), np.eye(3))


def test_identity_channels_leave_input_alone(rng):
    rho = random_density(rng, 2)
    out = run_switch(identity_channel(2), identity_channel(2), rho)
    assert np.abs(out.joint.mat - kron(rho.mat, projector(KET_PLUS))).max() <= 1e-15
    assert np.abs(out.a_pp.mat - rho.mat).max() <= 1e-15
    assert np.abs(out.a_mm.mat).max() <= 1e-15


def test_bell_blocks_at_half():
    sw = bell_switch(0.5)
    assert abs(sw.a_pp.mat[0, 0] - 0.375) <= 1e-15
    assert abs(sw.a_pp.mat[0, 3] - 0.1875) <= 1e-15
    assert abs(sw.a_pp.mat[1, 1] - 0.09375) <= 1e-15
    assert np.abs(sw.a_mm.mat - 0.0625 * projector(PSI_MINUS)).max() <= 1e-15


@pytest.mark.parametrize("eps", [0.0, 0.1, 0.37, 0.5, 1.0])
def test_bell_minus_block_is_singlet(eps):
    sw = bell_switch(eps)
    assert np.abs(sw.a_mm.mat - eps**2 / 4 * projector(PSI_MINUS)).max() <= 1e-14


@pytest.mark.parametrize("eps", [0.0, 0.25, 0.6, 1.0])
def test_block_identities(eps):
    sw = bell_switch(eps)
    assert np.abs(sw.a_pp.mat - (0.5 * sw.a_def.mat + 0.5 * sw.a_indef)).max() <= 1e-14
    assert np.abs(sw.a_mm.mat - (0.5 * sw.a_def.mat - 0.5 * sw.a_indef)).max() <= 1e-14
    assert abs(np.trace(sw.a_def.mat) - 1) <= 1e-14
    assert abs(np.trace(sw.a_pp.mat + sw.a_mm.mat) - 1) <= 1e-14
    assert np.abs(sw.a_mp - sw.a_pm.conj().T).max() == 0
    # the off-diagonal blocks vanish for this pair of monitorings
    assert np.abs(sw.a_pm).max() <= 1e-15


def _blocks_from_computational(sw, d):
    # <x|_C joint |y>_C assembled from the |i><j| blocks of the joint state
    j = sw.joint.mat.reshape(d, 2, d, 2)
    comp = {(a, b): j[:, a, :, b] for a in range(2) for b in range(2)}
    sign = {"+": 1.0, "-": -1.0}
    out = {}
    for x in "+-":
        for y in "+-":
            out[x, y] = 0.5 * (
                comp[0, 0] + sign[y] * comp[0, 1] + sign[x] * comp[1, 0] + sign[x] * sign[y] * comp[1, 1]
            )
    return out


def test_reconstruction_random(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        m = random_channel(rng, d, int(rng.integers(1, 4)))
        n = random_channel(rng, d, int(rng.integers(1, 4)))
        sw = run_switch(m, n, random_density(rng, d))
        ref = _blocks_from_computational(sw, d)
        for x in "+-":
            for y in "+-":
                assert np.abs(sw.block(x, y) - ref[x, y]).max() <= 1e-12
        rebuilt = sum(
            kron(sw.block(x, y), np.outer(kx, ky.conj()))
            for x, kx in (("+", KET_PLUS), ("-", KET_MINUS))
            for y, ky in (("+", KET_PLUS), ("-", KET_MINUS))
        )
        assert np.abs(rebuilt - sw.joint.mat).max() <= 1e-12


def test_a_minus_plus_computed_independently(rng):
    m = random_channel(rng, 3, 2)
    n = random_channel(rng, 3, 2)
    rho = random_density(rng, 3)
    sw = run_switch(m, n, rho)
    a_mp = sum(
        0.25 * (mi @ nj - nj @ mi) @ rho.mat @ (mi @ nj + nj @ mi).conj().T for mi in m.kraus for nj in n.kraus
    )
    assert np.abs(sw.a_mp - a_mp).max() <= 1e-13


def test_commuting_channels_give_no_minus_branch(rng):
    phases = [np.diag(np.exp(1j * rng.uniform(0, 6, 3))) for _ in range(4)]
    m = KrausChannel((np.sqrt(0.3) * phases[0], np.sqrt(0.7) * phases[1]))
    n = KrausChannel((np.sqrt(0.5) * phases[2], np.sqrt(0.5) * phases[3]))
    sw = run_switch(m, n, random_density(rng, 3))
    assert np.abs(sw.a_mm.mat).max() <= 1e-15
    post = postselect(sw, "minus")
    assert not post.defined and post.conditional is None


def test_postselection_bell():
    eps = 0.5
    sw = bell_switch(eps)
    plus = postselect(sw, "plus")
    minus = postselect(sw, "minus")
    assert abs(plus.probability - (1 - eps**2 / 4)) <= 1e-15
    assert abs(minus.probability - eps**2 / 4) <= 1e-15
    assert np.abs(minus.conditional.mat - projector(PSI_MINUS)).max() <= 1e-14
    assert postselect(bell_switch(0.0), "minus").conditional is None


def test_postselect_rejects_bad_outcome():
    with pytest.raises(ValueError):
        postselect(bell_switch(0.5), "zero")


def test_general_control_state(rng):
    rho_c = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
    m = random_channel(rng, 2, 2)
    n = random_channel(rng, 2, 2)
    rho = random_density(rng, 2)
    sw = run_switch(m, n, rho, rho_c)
    assert sw.a_pp is None
    # control in |0> applies m after n only
    want = sum((mi @ nj) @ rho.mat @ (mi @ nj).conj().T for mi in m.kraus for nj in n.kraus)
    assert np.abs(sw.joint.mat - kron(want, P0)).max() <= 1e-13
    post = postselect(sw, "plus")
    assert abs(post.probability - 0.5) <= 1e-13
    assert np.abs(post.conditional.mat - want).max() <= 1e-13
    assert np.abs(project_control(sw.joint, "minus") - 0.5 * want).max() <= 1e-13


def test_dimension_checks(rng):
    with pytest.raises(DimensionError):
        run_switch(identity_channel(2), identity_channel(3), random_density(rng, 2))
    with pytest.raises(DimensionError):
        run_switch(identity_channel(2), identity_channel(2), random_density(rng, 3))
