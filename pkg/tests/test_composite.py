from __future__ import annotations

import numpy as np
import pytest

from gptkit.bloch import equator_state, product_effect_probability, two_gbit_bloch
from gptkit.composite import (
    CompositeSpace,
    check_no_signaling,
    compose,
    correlation_table,
    joint_probability,
    local_tomography_dim_check,
    product_effect,
    product_state,
    product_transformation,
    reduce,
)
from gptkit.core import BallSpace, DimensionError, DomainError, ProductHullSpace, unit_effect
from gptkit.groups import haar_su
from gptkit.instances import ball_gbit, boxworld_gbit, boxworld_pair, classical, quantum
from gptkit.lp import capacity


def test_dim_law_examples():
    assert local_tomography_dim_check(3, 3, 15)
    assert local_tomography_dim_check(1, 1, 3)
    assert not local_tomography_dim_check(3, 3, 16)


def test_composite_space_rejects_wrong_joint_dimension():
    q = quantum(2).space
    with pytest.raises(DimensionError):
        CompositeSpace(q, q, quantum(3).space, "quantum")


def test_product_state_and_reductions(rng):
    ball = BallSpace(3)
    a, b = ball.sample_pure(rng, 2)
    ab = product_state(a, b)
    assert ab.coords[0] == 1.0
    assert np.allclose(reduce(ab, "A").coords, a) and np.allclose(reduce(ab, "B").coords, b)
    bb = two_gbit_bloch(ab)
    assert np.allclose(bb.C, np.outer(bb.alpha, bb.beta), atol=1e-12)
    with pytest.raises(DimensionError):
        comp, _ = compose(quantum(2), quantum(2))
        product_state(a, classical(3).space.vertices[0], comp)


def test_joint_probability_examples(rng):
    comp, inst = compose(quantum(2), quantum(2))
    u = unit_effect(3)
    for psi in inst.space.sample_states(rng, 10):
        assert joint_probability(u, u, psi) == pytest.approx(1.0, abs=1e-12)
    ball = BallSpace(3)
    for _ in range(20):
        psi = inst.space.sample_pure(rng, 1)[0]
        fa, fb = rng.standard_normal(3), rng.standard_normal(3)
        fa, fb = fa / np.linalg.norm(fa), fb / np.linalg.norm(fb)
        ea, eb = ball.effect_from_bloch(0.5, 0.5 * fa), ball.effect_from_bloch(0.5, 0.5 * fb)
        assert joint_probability(ea, eb, psi) == pytest.approx(
            product_effect_probability(fa, fb, two_gbit_bloch(psi)), abs=1e-12)
    a, b = ball.sample_pure(rng, 2)
    ea = ball.effect_from_bloch(0.5, [0.5, 0, 0])
    assert joint_probability(ea, ea, product_state(a, b)) == pytest.approx(ea(a) * ea(b), abs=1e-12)
    with pytest.raises(DimensionError):
        joint_probability(ea, ea, classical(3).space.vertices[0])


def test_no_signaling_examples(rng):
    ball = BallSpace(3)
    a, b = ball.sample_pure(rng, 2)
    r = check_no_signaling(product_state(a, b))
    assert r.ok and r.max_violation < 1e-15
    pr = boxworld_pair().space.vertices[16]
    assert check_no_signaling(pr).ok
    T = correlation_table(pr)
    T[0, 0] = [[1.0, 0.0], [0.0, 0.0]]  # A's outcome now depends on B's input
    bad = check_no_signaling(T)
    assert not bad and bad.worst is not None and bad.max_violation == pytest.approx(0.5)


def test_reduce_methods_agree(rng):
    _, inst = compose(quantum(2), quantum(2))
    for psi in inst.space.sample_states(rng, 1000):
        reduce(psi, "A")
        reduce(psi, "B")
    with pytest.raises(DomainError):
        reduce(psi, "C")


def test_equator_reduction():
    b = equator_state(0.7, 1.3)
    red = reduce(b.to_state(), "A")
    assert np.allclose(BallSpace(3).to_bloch(red), [np.cos(0.7), 0, 0], atol=1e-12)


def test_product_transformations_commute_with_reduction(rng):
    comp, inst = compose(quantum(2), quantum(2))
    q = quantum(2).space
    for _ in range(10):
        TA, TB = q.represent(haar_su(2, rng)), q.represent(haar_su(2, rng))
        psi = inst.space.sample_states(rng, 1)[0]
        out = product_transformation(TA, TB).matrix @ psi
        assert np.allclose(reduce(out, "A").coords, TA @ reduce(psi, "A").coords, atol=1e-12)
        assert inst.space.contains(out)


def test_quantum_joint_is_two_qubit_density_matrices(rng):
    _, inst = compose(quantum(2), quantum(2))
    J = inst.space
    for psi in J.sample_states(rng, 200):
        assert np.linalg.eigvalsh(J.to_operator(psi)).min() >= -1e-9


def test_capacity_multiplies(rng):
    _, j = compose(classical(2), classical(3))
    assert capacity(j.space).value == 6
    _, jq = compose(quantum(2), quantum(2))
    q = quantum(2).space
    poles = [q.state_from_ket(k) for k in np.eye(2)]
    cands = [np.kron(a, b) for a in poles for b in poles] + list(jq.space.sample_pure(rng, 20))
    cert = capacity(jq.space, candidate_pures=cands)
    assert cert.value == 4 and cert.residual < 1e-9


def test_compose_rules():
    _, j = compose(boxworld_gbit(), boxworld_gbit())
    assert j.space.n_vertices == 24
    _, j = compose(ball_gbit(5), ball_gbit(5))
    assert isinstance(j.space, ProductHullSpace) and j.composite_rule == "local-tomography-min"
    _, j = compose(classical(2), classical(2))
    assert j.dim == 3 and j.space.n_vertices == 4


def test_product_effect_is_kronecker():
    e = product_effect([0.0, 1.0], [1.0, -1.0])
    assert np.allclose(e.dual, [0, 0, 1, -1])
