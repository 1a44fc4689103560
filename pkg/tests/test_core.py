from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptkit.core import (
    BallSpace,
    DimensionError,
    DomainError,
    Effect,
    LinearMap,
    Measurement,
    QuantumSpace,
    StateVector,
    UnsupportedRepresentation,
    VertexSpace,
    evaluate_effect,
    is_member,
    mix,
    sample_effects,
    unit_effect,
)
from gptkit.instances import catalog, classical


def test_state_vector_requires_normalization():
    with pytest.raises(DomainError):
        StateVector([0.9, 0.1])
    s = StateVector([1.0 + 1e-13, 0.5])
    assert s.coords[0] == 1.0
    assert s.dim == 1
    with pytest.raises(ValueError):
        s.coords[1] = 0.2


def test_unit_effect_is_one_on_any_state(rng):
    for inst in (classical(3), ):
        for psi in inst.space.sample_states(rng, 20):
            assert evaluate_effect(unit_effect(inst.dim), psi) == pytest.approx(1.0, abs=1e-15)


def test_qubit_pole_effect_values():
    ball = BallSpace(3)
    om = ball.effect_from_bloch(0.5, [0.0, 0.0, 0.5])
    assert om(ball.from_bloch([0, 0, 1])) == pytest.approx(1.0, abs=1e-15)
    assert om(ball.from_bloch([0, 0, -1])) == pytest.approx(0.0, abs=1e-15)
    assert om(ball.mu) == pytest.approx(0.5, abs=1e-15)


def test_evaluate_effect_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate_effect(unit_effect(2), StateVector([1.0, 0.5]))


def test_membership_examples():
    c3 = classical(3).space
    assert is_member(c3, StateVector([1.0, 0.2, 0.3]))
    assert not is_member(c3, StateVector([1.0, 0.7, 0.4]))
    ball = BallSpace(3)
    assert not is_member(ball, ball.from_bloch([1.01, 0, 0]), tol=1e-9)
    q = QuantumSpace.standard(2)
    psi = ball.from_bloch([0.6, 0.0, 0.8])
    # oracle: eigenvalues of (I + 0.6 X + 0.8 Z) / 2 are {0, 1}
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1.0, -1.0])
    ev = np.linalg.eigvalsh((np.eye(2) + 0.6 * X + 0.8 * Z) / 2)
    assert ev == pytest.approx([0.0, 1.0], abs=1e-12)
    assert is_member(q, psi)


def test_is_member_rejects_unknown_space():
    with pytest.raises(UnsupportedRepresentation):
        is_member(object(), StateVector([1.0]))


def test_mix_examples():
    ball = BallSpace(3)
    a = ball.from_bloch([0, 0, 1])
    b = ball.from_bloch([0, 0, -1])
    assert np.allclose(ball.to_bloch(mix(a, b, 0.5)), 0.0, atol=1e-15)
    v = classical(2).space.vertices
    assert np.allclose(mix(v[0], v[1], 0.25).coords, [1.0, 0.25])
    psi = StateVector([1.0, 0.3])
    assert mix(psi, psi, 0.3) == psi
    with pytest.raises(DomainError):
        mix(a, b, 1.5)


@settings(max_examples=60, deadline=None)
@given(q=st.floats(0, 1), r=st.floats(0, 1), seed=st.integers(0, 2**32 - 1))
def test_mix_reweighting_is_associative(q, r, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (StateVector(x) for x in classical(4).space.sample_states(rng, 3))
    nested = mix(mix(a, b, q), c, r)
    direct = r * q * a.coords + r * (1 - q) * b.coords + (1 - r) * c.coords
    assert np.max(np.abs(nested.coords - direct)) < 1e-12


def test_measurement_sums_to_unit():
    e = Effect([0.0, 1.0])
    m = Measurement.completing([e, e.complement()])
    assert m.unit_deviation < 1e-12
    with pytest.raises(DomainError):
        Measurement((Effect([0.0, 1.0]), Effect([0.5, 0.0])))
    with pytest.raises(DimensionError):
        Measurement((Effect([0.0, 1.0]), Effect([1.0, -1.0, 0.0])))


def test_linear_map_transformation_keeps_normalization():
    with pytest.raises(DomainError):
        LinearMap([[0.5, 0.0], [0.0, 1.0]], is_transformation=True)
    T = LinearMap(np.eye(3)[[0, 2, 1]], is_transformation=True)
    assert np.allclose(T(StateVector([1.0, 0.2, 0.7])).coords, [1.0, 0.7, 0.2])
    e = Effect([0.0, 1.0, 0.0])
    assert T.apply_effect(e)(StateVector([1.0, 0.2, 0.7])) == pytest.approx(0.7)


def test_vertex_space_pure_states_and_weights():
    sp = classical(3).space
    w = sp.convex_weights([1.0, 0.2, 0.3])
    assert w == pytest.approx([0.2, 0.3, 0.5], abs=1e-9)
    redundant = VertexSpace(np.vstack([sp.vertices, [[1.0, 0.5, 0.5]]]))
    assert redundant.non_extreme_vertices() == [3]


@pytest.mark.parametrize("name", ["classical:1", "classical:3", "classical:5", "quantum:2",
                                  "quantum:3", "ball:1", "ball:3", "ball:7", "boxworld",
                                  "boxworld-pair"])
def test_effects_in_range_on_sampled_pure_states(name, rng):
    inst = catalog().build(name)
    sp = inst.space
    pures = sp.sample_pure(rng, 1000)
    effects = sample_effects(sp, rng, 20)
    vals = pures @ np.array([e.dual for e in effects]).T
    assert vals.min() >= -1e-9 and vals.max() <= 1 + 1e-9
    assert all(sp.contains(p) for p in pures[:50])
