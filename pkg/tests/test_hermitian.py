from __future__ import annotations

import numpy as np
import pytest

from gptkit.bloch import TwoGbitBloch, equator_state, two_gbit_bloch
from gptkit.composite import compose, product_state
from gptkit.core import BallSpace, DimensionError, DomainError
from gptkit.groups import haar_so, haar_su
from gptkit.hermitian import (
    covariance_check,
    is_special_unitary,
    isometry_check,
    l_map,
    l_map_tensor,
    pauli,
    rz,
    so3_to_su2,
    su2_to_so3,
)
from gptkit.instances import quantum

BALL = BallSpace(3)


def _pure(rng):
    return BALL.sample_pure(rng, 1)[0]


def test_l_map_examples(rng):
    assert np.allclose(l_map(BALL.mu), np.eye(2) / 2)
    assert np.allclose(l_map(BALL.from_bloch([0, 0, 1.0])), np.diag([1.0, 0.0]))
    for psi in BALL.sample_pure(rng, 50):
        rho = l_map(psi)
        assert np.allclose(rho, rho.conj().T, atol=1e-12)
        w = np.linalg.eigvalsh(rho)
        assert w == pytest.approx([0.0, 1.0], abs=1e-12)
    with pytest.raises(DimensionError):
        l_map(np.ones(5))


def test_l_map_explicit_formula(rng):
    s = pauli()
    for psi in BALL.sample_states(rng, 20):
        direct = psi[0] * (np.eye(2) - s.sum(axis=0)) / 2 + np.tensordot(psi[1:], s, axes=1)
        assert np.max(np.abs(l_map(psi) - direct)) < 1e-12


def test_l_map_tensor_products(rng):
    phi = _pure(rng)
    P = l_map(phi)
    assert np.max(np.abs(l_map_tensor(np.kron(phi, phi), 2) - np.kron(P, P))) < 1e-12
    assert np.max(np.abs(l_map_tensor(np.kron(np.kron(phi, phi), phi), 3) - np.kron(np.kron(P, P), P))) < 1e-12
    with pytest.raises(DomainError):
        l_map_tensor(phi, 4)
    with pytest.raises(DimensionError):
        l_map_tensor(phi, 2)


def test_two_gbit_image_expansion(rng):
    s = pauli()
    _, inst = compose(quantum(2), quantum(2))
    for psi in inst.space.sample_states(rng, 50):
        b = two_gbit_bloch(psi)
        rho = np.kron(np.eye(2), np.eye(2)).astype(complex)
        rho += sum(b.alpha[i] * np.kron(s[i], np.eye(2)) for i in range(3))
        rho += sum(b.beta[j] * np.kron(np.eye(2), s[j]) for j in range(3))
        rho += sum(b.C[i, j] * np.kron(s[i], s[j]) for i in range(3) for j in range(3))
        assert np.max(np.abs(l_map_tensor(psi, 2) - rho / 4)) < 1e-12


def test_equator_image_is_rank_one():
    for u in np.linspace(0, np.pi, 9, endpoint=False):
        w = np.linalg.eigvalsh(l_map_tensor(equator_state(u, 0.0).to_state(), 2))
        assert w == pytest.approx([0, 0, 0, 1], abs=1e-12)


def test_isometry_examples(rng):
    a, b = _pure(rng), _pure(rng)
    prod = np.kron(a, b)
    lhs, rhs = isometry_check(prod, prod)
    assert lhs == pytest.approx(1.0, abs=1e-12) and rhs == pytest.approx(1.0, abs=1e-12)
    lhs, rhs = isometry_check(prod, np.kron(BALL.mu, BALL.mu))
    assert lhs == pytest.approx(0.25, abs=1e-12) and rhs == pytest.approx(0.25, abs=1e-12)


def test_isometry_random_pairs(rng):
    _, inst = compose(quantum(2), quantum(2))
    S = inst.space.sample_states(rng, 2000)
    worst = max(abs(np.subtract(*isometry_check(x, y))) for x, y in zip(S[::2], S[1::2]))
    assert worst < 1e-12


def test_su2_to_so3_examples(rng):
    assert np.allclose(su2_to_so3(np.eye(2)).matrix, np.eye(3))
    t = np.pi / 3
    Rz = np.array([[np.cos(t), -np.sin(t), 0], [np.sin(t), np.cos(t), 0], [0, 0, 1]])
    assert np.max(np.abs(su2_to_so3(rz(t)).matrix - Rz)) < 1e-12
    for _ in range(100):
        U, V = haar_su(2, rng), haar_su(2, rng)
        G = su2_to_so3(U @ V).matrix
        assert np.max(np.abs(G - su2_to_so3(U).matrix @ su2_to_so3(V).matrix)) < 1e-12
        assert np.max(np.abs(G.T @ G - np.eye(3))) < 1e-12
        assert np.linalg.det(G) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        su2_to_so3(np.diag([1.0, 2.0]))
    with pytest.raises(DomainError):
        su2_to_so3(np.diag([1.0, -1.0]))  # unitary with det -1


def test_so3_to_su2_surjective(rng):
    for _ in range(1000):
        R = haar_so(3, rng)
        U = so3_to_su2(R)
        assert is_special_unitary(U)
        assert np.max(np.abs(su2_to_so3(U).matrix - R)) < 1e-9
    Rpi = np.diag([1.0, -1.0, -1.0])
    assert np.max(np.abs(su2_to_so3(so3_to_su2(Rpi)).matrix - Rpi)) < 1e-9


def test_covariance(rng):
    eq = BALL.from_bloch([1.0, 0.0, 0.0])
    assert covariance_check(np.eye(2), eq)
    assert covariance_check(rz(0.8), eq, tol=1e-12)
    for _ in range(20):
        assert covariance_check(haar_su(2, rng), BALL.sample_states(rng, 1)[0])
    two = equator_state(1.1, 0.3).to_state()
    assert covariance_check((haar_su(2, rng), haar_su(2, rng)), two, tol=1e-12)
    with pytest.raises(DimensionError):
        covariance_check(np.eye(2), np.ones(9))


def test_images_of_joint_set_are_positive(rng):
    _, inst = compose(quantum(2), quantum(2))
    kets = rng.standard_normal((50, 4)) + 1j * rng.standard_normal((50, 4))
    kets /= np.linalg.norm(kets, axis=1)[:, None]
    for psi in inst.space.sample_states(rng, 200):
        rho = l_map_tensor(psi, 2)
        assert np.linalg.eigvalsh(rho).min() >= -1e-9
        p = np.real(np.einsum("ki,ij,kj->k", kets.conj(), rho, kets))
        assert p.min() >= -1e-9 and p.max() <= 1 + 1e-9


def test_entanglement_witness_direction_has_negative_eigenvalue():
    # C = I correlates all three axes positively; each entry is in range but
    # the singlet direction gets weight -1/2
    b = TwoGbitBloch(np.zeros(3), np.zeros(3), np.eye(3))
    rho = l_map_tensor(b.to_state(), 2)
    assert np.linalg.eigvalsh(rho).min() < -0.4
