import numpy as np
import pytest

from uhardy import CapacityError, DomainError, ValidationError
from uhardy.partitions import VACUUM, canonicalize_key
from uhardy.unitary import (
    GroupElement,
    RandomStream,
    UnitaryMatrix,
    dumps_matrices,
    embed,
    epsilon_basis,
    epsilon_table,
    haar_batch,
    haar_sample,
    livsic_chain,
    livsic_project,
    loads_matrices,
    rho,
    right_action,
    unitarity_defect,
    zeta,
)

SWAP = [[0, 1], [1, 0]]


def close(a, b, tol=1e-12):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


def test_stream_replays_and_separates():
    a = RandomStream(5, 1).generator.random(4)
    assert np.array_equal(a, RandomStream(5, 1).generator.random(4))
    assert not np.array_equal(a, RandomStream(5, 2).generator.random(4))
    assert not np.array_equal(a, RandomStream(6, 1).generator.random(4))
    child = RandomStream(5, 1).spawn(3)
    assert child.path == (3,)
    assert not np.array_equal(a, child.generator.random(4))


def test_unitary_matrix_checks():
    with pytest.raises(ValidationError):
        UnitaryMatrix([[1, 1], [0, 1]])
    with pytest.raises(ValidationError):
        UnitaryMatrix([[1, 0]])
    u = UnitaryMatrix(SWAP)
    assert u.adjoint() @ u == UnitaryMatrix.identity(2)
    with pytest.raises(ValueError):
        u.entries[0, 0] = 3


def test_haar_u1_is_a_phase(rs):
    for _ in range(20):
        u = haar_sample(1, rs)
        assert abs(abs(u.entries[0, 0]) - 1) <= 1e-12


@pytest.mark.parametrize("m", [1, 2, 5, 17])
def test_haar_batch_unitary(rs, m):
    us = haar_batch(m, 50, rs)
    assert us.shape == (50, m, m)
    assert max(unitarity_defect(u) for u in us) <= 1e-10


def test_haar_capacity(rs):
    with pytest.raises(CapacityError):
        haar_batch(257, 1, rs)


def test_haar_first_column_moments():
    # |u11|^2 has mean 1/3 on U(3); u11 has mean 0 by phase symmetry
    u11 = haar_batch(3, 100_000, RandomStream(99))[:, 0, 0]
    a = np.abs(u11) ** 2
    assert abs(a.mean() - 1 / 3) <= 4 * a.std() / np.sqrt(a.size)
    assert abs(u11.mean()) <= 4 * np.sqrt(np.mean(np.abs(u11) ** 2) / u11.size)


def test_haar_phase_fix_matters():
    # Haar entries have uniform phase, so Re u11 averages to 0; the raw
    # Householder factor is biased (its R diagonal is real with a fixed sign)
    us = haar_batch(2, 50_000, RandomStream(3))
    re = us[:, 0, 0].real
    assert abs(re.mean()) <= 4 * re.std() / np.sqrt(re.size)
    g = np.random.default_rng(3)
    z = g.standard_normal((50_000, 2, 2)) + 1j * g.standard_normal((50_000, 2, 2))
    raw = np.linalg.qr(z)[0][:, 0, 0].real
    assert abs(raw.mean()) > 10 * raw.std() / np.sqrt(raw.size)


def test_livsic_examples():
    assert livsic_project(UnitaryMatrix.identity(2)) == UnitaryMatrix.identity(1)
    assert close(livsic_project(UnitaryMatrix(SWAP)).entries, [[-1]])
    assert close(livsic_project(UnitaryMatrix([[1, 0], [0, -1]])).entries, [[1]])
    with pytest.raises(DomainError):
        livsic_project(UnitaryMatrix.identity(1))


def test_livsic_preserves_unitarity(rs):
    for m in (2, 3, 6):
        for u in haar_batch(m, 20, rs):
            assert unitarity_defect(livsic_project(UnitaryMatrix(u)).entries) <= 1e-10


def test_livsic_chain(rs):
    assert livsic_chain(UnitaryMatrix.identity(4), 2) == UnitaryMatrix.identity(2)
    u = haar_sample(3, rs)
    assert livsic_chain(u, 3) == u
    u2 = haar_sample(2, rs)
    assert livsic_chain(embed(u2, 4), 2) == u2
    with pytest.raises(DomainError):
        livsic_chain(u, 4)


def test_embed_examples(rs):
    u2 = haar_sample(2, rs)
    assert embed(u2, 2) == u2
    assert embed(UnitaryMatrix.identity(2), 4) == UnitaryMatrix.identity(4)
    assert close(embed(UnitaryMatrix(SWAP), 3).entries, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    with pytest.raises(DomainError):
        embed(u2, 1)


def test_group_element_projection(rs):
    u = haar_sample(4, rs)
    g = rho(u)
    assert g.project(4) == u
    assert g.project(6) == embed(u, 6)
    assert g.project(2) == livsic_chain(u, 2)
    with pytest.raises(ValidationError):
        GroupElement(3, u)


def test_right_action_examples(rs):
    u = rho(haar_sample(3, rs))
    i3 = UnitaryMatrix.identity(3)
    assert right_action(u, i3, i3) == u
    v = haar_sample(2, rs)
    moved = right_action(rho(UnitaryMatrix.identity(2)), v, UnitaryMatrix.identity(2))
    assert moved.matrix == v
    with pytest.raises(ValidationError):
        right_action(u, v, i3)


@pytest.mark.parametrize("level,m", [(3, 2), (4, 2), (5, 3)])
def test_projection_intertwines_the_action(rs, level, m):
    # Livsic projection commutes with the action of U(m) x U(m) on higher levels
    for _ in range(10):
        u = rho(haar_sample(level, rs))
        v, w = haar_sample(m, rs), haar_sample(m, rs)
        lhs = right_action(u, v, w).project(m)
        rhs = w.adjoint() @ u.project(m) @ v
        assert close(lhs.entries, rhs.entries, 1e-10)


def test_zeta_and_epsilon(rs):
    assert close(zeta(rho(UnitaryMatrix.identity(3))), [1, 0, 0])
    assert close(zeta(rho(UnitaryMatrix(SWAP))), [0, 1])
    u = rho(haar_sample(4, rs))
    assert abs(np.linalg.norm(zeta(u)) - 1) <= 1e-12
    a, b = zeta(u)[:2]
    key = canonicalize_key([(1, 2), (2, 1)])
    assert abs(epsilon_basis(u, key) - a * a * b) <= 1e-14
    assert epsilon_basis(u, VACUUM) == 1
    padded = rho(embed(u.matrix, 5))
    assert abs(epsilon_basis(padded, key) - epsilon_basis(u, key)) == 0
    # indices past the stored level read as zero
    assert epsilon_basis(u, canonicalize_key([(7, 1)])) == 0


def test_epsilon_table_shape(rs):
    cols = haar_batch(3, 10, rs)[:, :, 0]
    keys = [VACUUM, canonicalize_key([(1, 1)]), canonicalize_key([(2, 2), (3, 1)])]
    t = epsilon_table(cols, keys)
    assert t.shape == (10, 3)
    assert close(t[:, 2], cols[:, 1] ** 2 * cols[:, 2], 1e-14)


def test_matrix_json_round_trip(rs):
    mats = [haar_sample(m, rs) for m in (1, 2, 3)]
    assert loads_matrices(dumps_matrices(mats)) == mats
    with pytest.raises(ValidationError):
        UnitaryMatrix.from_json_obj([[1, 2]])
