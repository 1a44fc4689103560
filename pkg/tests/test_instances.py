from __future__ import annotations

import itertools

import numpy as np
import pytest

from gptkit.core import DomainError, QuantumSpace
from gptkit.instances import (
    ball_gbit,
    boxworld_gbit,
    boxworld_pair,
    catalog,
    chsh_value,
    classical,
    diagonal_embedding,
    from_name,
    quantum,
)
from gptkit.lp import capacity


def test_classical_basics():
    assert classical(1).dim == 0 and classical(1).space.n_vertices == 1
    assert classical(2).dim == 1 and classical(2).space.n_vertices == 2
    assert classical(4).dim == 3
    with pytest.raises(DomainError):
        classical(0)


def test_quantum_basics():
    assert quantum(2).dim == 3
    assert quantum(3).dim == 8
    for c in (1, 5):
        with pytest.raises(DomainError):
            quantum(c)


def test_quantum2_capacity_is_two(rng):
    sp = quantum(2).space
    kets = [np.array([1, 0]), np.array([0, 1])]
    cands = np.vstack([[sp.state_from_ket(k) for k in kets], sp.sample_pure(rng, 20)])
    assert capacity(sp, candidate_pures=cands).value == 2


def test_ball_gbit_three_is_the_qubit(rng):
    ball = ball_gbit(3).space
    q = quantum(2).space
    for psi in ball.sample_pure(rng, 20):
        rho = q.to_operator(psi)
        assert np.linalg.eigvalsh(rho) == pytest.approx([0.0, 1.0], abs=1e-12)


def test_ball_gbit_one_is_the_classical_bit():
    seg = ball_gbit(1).space
    assert seg.contains([1.0, 1.0]) and seg.contains([1.0, 0.0])
    assert not seg.contains([1.0, 1.1])
    assert ball_gbit(1).group.named == "O"
    assert ball_gbit(3).group.named == "SO"


def _ns_vertices_bruteforce() -> list[np.ndarray]:
    """Vertices of the (2,2,2) no-signaling polytope from the raw table P[a,b,x,y]."""
    idx = {k: n for n, k in enumerate(itertools.product((0, 1), repeat=4))}
    eqs = []
    for x, y in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for a, b in itertools.product((0, 1), repeat=2):
            row[idx[a, b, x, y]] = 1.0
        eqs.append((row, 1.0))
    for a, x in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for b in (0, 1):
            row[idx[a, b, x, 0]] += 1.0
            row[idx[a, b, x, 1]] -= 1.0
        eqs.append((row, 0.0))
    for b, y in itertools.product((0, 1), repeat=2):
        row = np.zeros(16)
        for a in (0, 1):
            row[idx[a, b, 0, y]] += 1.0
            row[idx[a, b, 1, y]] -= 1.0
        eqs.append((row, 0.0))
    E = np.array([r for r, _ in eqs])
    f = np.array([v for _, v in eqs])
    verts: list[np.ndarray] = []
    for zeros in itertools.combinations(range(16), 8):
        M = np.vstack([E, np.eye(16)[list(zeros)]])
        rhs = np.concatenate([f, np.zeros(8)])
        if np.linalg.matrix_rank(M) < 16:
            continue
        p = np.linalg.lstsq(M, rhs, rcond=None)[0]
        if p.min() < -1e-9 or np.max(np.abs(M @ p - rhs)) > 1e-9:
            continue
        if not any(np.max(np.abs(p - q)) < 1e-9 for q in verts):
            verts.append(p)
    out = []
    for p in verts:
        v = np.zeros((3, 3))
        v[0, 0] = 1.0
        for x in (0, 1):
            v[x + 1, 0] = p[idx[0, 0, x, 0]] + p[idx[0, 1, x, 0]]
        for y in (0, 1):
            v[0, y + 1] = p[idx[0, 0, 0, y]] + p[idx[1, 0, 0, y]]
        for x, y in itertools.product((0, 1), repeat=2):
            v[x + 1, y + 1] = p[idx[0, 0, x, y]]
        out.append(v.ravel())
    return out


def test_boxworld_pair_matches_bruteforce_no_signaling_polytope():
    ref = _ns_vertices_bruteforce()
    V = boxworld_pair().space.vertices
    assert len(ref) == 24 and len(V) == 24
    for r in ref:
        assert np.min(np.max(np.abs(V - r), axis=1)) < 1e-9


def test_pr_vertices_reach_chsh_four():
    V = boxworld_pair().space.vertices
    values = [chsh_value(v) for v in V[16:]]
    assert max(values) == pytest.approx(4.0, abs=1e-12)
    assert max(abs(chsh_value(v)) for v in V[:16]) == pytest.approx(2.0, abs=1e-12)


def test_relabeling_group_orders():
    assert boxworld_pair().group.order() == 128
    assert boxworld_gbit().group.order() == 8


def test_boxworld_square():
    sq = boxworld_gbit()
    assert sq.space.n_vertices == 4 and sq.dim == 2
    assert sq.effect_policy == "generated-by-local-products"


def test_diagonal_embedding_preserves_capacity():
    for c in (2, 3, 4):
        L = diagonal_embedding(c).matrix
        qs = QuantumSpace.standard(c)
        images = classical(c).space.vertices @ L.T
        assert all(qs.contains(v) for v in images)
        assert capacity(qs, candidate_pures=images).value == c


@pytest.mark.parametrize("name", catalog().names())
def test_catalog_instances_are_consistent(name, rng):
    inst = catalog().build(name)
    sp = inst.space
    pures = sp.sample_pure(rng, 30)
    assert all(sp.contains(p) for p in pures)
    for G in inst.group.sample(sp, rng, 5):
        for p in pures[:10]:
            assert sp.contains(G @ p, 1e-9)


def test_from_name_rejects_unknown():
    with pytest.raises(DomainError):
        from_name("polygon:5")
    assert from_name(" quantum:3 ").dim == 8
