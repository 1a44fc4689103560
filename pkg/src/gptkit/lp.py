"""Linear-programming questions about state spaces.

Polytopes are handled with the dense simplex in :mod:`gptkit.simplex`. Balls
and quantum state spaces are not polytopes, so their answers come from the
closed-form description of their effects; an LP over an inscribed polytope
is attached where it yields an infeasibility certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    BallSpace,
    CapacityCertificate,
    DomainError,
    Effect,
    Measurement,
    QuantumSpace,
    StateSpace,
    StateVector,
    VertexSpace,
    as_coords,
    unit_effect,
)
from .simplex import LPProblem, LPResult, SolverError, solve

__all__ = [
    "LPProblem",
    "LPResult",
    "SolverError",
    "solve",
    "Infeasible",
    "fibonacci_sphere",
    "find_distinguishing_measurement",
    "distinguishing_residual",
    "capacity",
    "find_tight_effect",
    "is_completely_mixed",
    "enumerate_vertices",
    "effect_polytope_vertices",
]


@dataclass
class Infeasible:
    """Negative answer with the reason and, where available, a certificate."""

    reason: str
    certificate: Any = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def fibonacci_sphere(n: int, dim: int = 3) -> np.ndarray:
    """Roughly uniform unit vectors; a golden-angle spiral for ``dim = 3``."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        t = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(t), np.sin(t)])
    if dim == 3:
        i = np.arange(n) + 0.5
        z = 1 - 2 * i / n
        r = np.sqrt(1 - z * z)
        phi = np.pi * (1 + 5**0.5) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(12345)
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


# ------------------------------------------------------- distinguishability


def _vertex_lp(states: np.ndarray, V: np.ndarray, tol: float):
    n, size = states.shape
    nv = n * size
    cons = []
    for a in range(n):
        for b in range(n):
            row = np.zeros(nv)
            row[a * size:(a + 1) * size] = states[b]
            cons.append((row, "==", 1.0 if a == b else 0.0))
    for a in range(n):
        for v in V:
            row = np.zeros(nv)
            row[a * size:(a + 1) * size] = v
            cons.append((row, ">=", 0.0))
    unit = unit_effect(size - 1).dual
    for k in range(size):
        row = np.zeros(nv)
        row[k::size] = 1.0
        cons.append((row, "==", unit[k]))
    p = LPProblem(np.zeros(nv), cons, [(None, None)] * nv)
    return p, solve(p, tol=tol)


def distinguishing_residual(meas: Measurement, states: Sequence, space: StateSpace) -> float:
    """Worst deviation from the delta table plus any effect-range violation."""
    S = np.array([as_coords(s) for s in states])
    table = np.array([[e.dual @ s for s in S] for e in meas.effects])
    k = len(S)
    worst = float(np.max(np.abs(table[:k, :k] - np.eye(k)))) if k else 0.0
    for e in meas.effects:
        lo, hi = space.effect_range(e)
        worst = max(worst, -lo, hi - 1.0)
    return worst


def find_distinguishing_measurement(states: Sequence, space: StateSpace,
                                    tol: float = DEFAULT_TOL) -> "Measurement | Infeasible":
    """Measurement whose outcome ``a`` fires exactly on ``states[a]``."""
    S = np.array([as_coords(s) for s in states], dtype=float)
    if S.ndim != 2 or S.shape[0] == 0:
        raise DomainError("need at least one state")
    for s in S:
        space.check_length(s)
    n = S.shape[0]
    if n == 1:
        return Measurement((space.unit(),))

    if isinstance(space, QuantumSpace):
        return _quantum_distinguish(S, space, tol)
    if isinstance(space, BallSpace):
        return _ball_distinguish(S, space, tol)
    if isinstance(space, VertexSpace):
        p, res = _vertex_lp(S, space.vertices, tol)
        if not res.optimal:
            return Infeasible("no effects satisfy the delta conditions on this polytope",
                              res.farkas, {"status": res.status})
        size = space.size
        effects = [res.x[a * size:(a + 1) * size] for a in range(n)]
        meas = Measurement.completing(effects)
        r = distinguishing_residual(meas, S, space)
        if r > 10 * tol:
            raise SolverError(f"distinguishing measurement fails verification by {r:.3e}")
        return meas
    raise DomainError(f"unsupported space representation {space.rep!r}")


def _ball_distinguish(S: np.ndarray, space: BallSpace, tol: float):
    B = np.array([space.to_bloch(s) for s in S])
    norms = np.linalg.norm(B, axis=1)
    if S.shape[0] == 2 and np.all(np.abs(norms - 1) <= tol) and np.linalg.norm(B[0] + B[1]) <= tol:
        e0 = space.effect_from_bloch(0.5, 0.5 * B[0])
        return Measurement.completing([e0, e0.complement()])
    # certificate: the same problem is infeasible on an inscribed polytope
    pts = fibonacci_sphere(96 if space.dim <= 3 else 160, space.dim)
    extra = [b / np.linalg.norm(b) for b in B if np.linalg.norm(b) > 1e-12]
    extra += [-x for x in extra]
    inner = np.vstack([pts] + ([np.array(extra)] if extra else []))
    V = np.array([space.from_bloch(b) for b in inner] + [s for s in S])
    _, res = _vertex_lp(S, V, tol)
    details = {"inscribed_points": len(V), "lp_status": res.status}
    if S.shape[0] > 2:
        reason = f"a ball has capacity 2; {S.shape[0]} states cannot be distinguished"
    else:
        reason = "only antipodal pure states are distinguishable in a ball"
    return Infeasible(reason, res.farkas if not res.optimal else None, details)


def _support_projector(rho: np.ndarray, tol: float) -> np.ndarray:
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = V[:, w > tol]
    return keep @ keep.conj().T


def _quantum_distinguish(S: np.ndarray, space: QuantumSpace, tol: float):
    rhos = [space.to_operator(s) for s in S]
    projs = [_support_projector(r, max(tol, 1e-10)) for r in rhos]
    for a, b in itertools.combinations(range(len(S)), 2):
        ov = float(np.real(np.trace(projs[a] @ rhos[b])))
        if ov > tol:
            return Infeasible("states have overlapping supports",
                              {"pair": [a, b], "overlap": ov})
    ops = projs[:-1]
    ops.append(np.eye(space.c) - sum(ops))
    effects = [space.effect_from_operator(P) for P in ops]
    meas = Measurement.completing(effects)
    return meas


# ------------------------------------------------------------------ capacity


def _pairwise_graph(S: np.ndarray, space: StateSpace, tol: float) -> np.ndarray:
    n = S.shape[0]
    adj = np.zeros((n, n), dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        if isinstance(space, BallSpace):
            bi, bj = space.to_bloch(S[i]), space.to_bloch(S[j])
            ok = (abs(np.linalg.norm(bi) - 1) <= tol and abs(np.linalg.norm(bj) - 1) <= tol
                  and np.linalg.norm(bi + bj) <= tol)
        elif isinstance(space, QuantumSpace):
            ri, rj = space.to_operator(S[i]), space.to_operator(S[j])
            ok = float(np.real(np.trace(_support_projector(ri, 1e-10) @ rj))) <= tol
        else:
            ok = bool(find_distinguishing_measurement([S[i], S[j]], space, tol))
        adj[i, j] = adj[j, i] = ok
    return adj


def _cliques(adj: np.ndarray, k: int):
    """All ``k``-cliques in index order."""
    n = adj.shape[0]

    def extend(clique, cands):
        if len(clique) == k:
            yield tuple(clique)
            return
        for pos, v in enumerate(cands):
            if len(clique) + len(cands) - pos < k:
                return
            yield from extend(clique + [v], [u for u in cands[pos + 1:] if adj[v, u]])

    yield from extend([], list(range(n)))


def capacity(space: StateSpace, max_c: int = 8, candidate_pures: Sequence | None = None,
             tol: float = DEFAULT_TOL, max_checks: int = 20000) -> CapacityCertificate:
    """Largest family of candidates that one measurement tells apart.

    Any distinguishable family is pairwise distinguishable, so candidate
    families are cliques of the pairwise graph; they are tried from the
    largest size down and each is verified by a full solve. When every clique
    one size larger was checked, the value is a certified upper bound over
    the pool.
    """
    if candidate_pures is None:
        if isinstance(space, VertexSpace):
            candidate_pures = space.vertices
        else:
            raise DomainError("candidate states are required for non-polytopic spaces")
    S = np.array([as_coords(s) for s in candidate_pures], dtype=float)
    if S.size == 0:
        raise DomainError("empty candidate set")
    if not 1 <= max_c <= 8:
        raise DomainError(f"max_c must be between 1 and 8, got {max_c}")
    if S.shape[0] > 64:
        raise DomainError(f"candidate pool of {S.shape[0]} exceeds 64")
    # duplicates can never be told apart; drop them up front
    uniq: list[int] = []
    for i in range(S.shape[0]):
        if all(np.max(np.abs(S[i] - S[j])) > tol for j in uniq):
            uniq.append(i)
    S = S[uniq]
    adj = _pairwise_graph(S, space, tol)
    checks = 0
    exhausted_above = False
    for k in range(min(max_c, S.shape[0]), 0, -1):
        all_checked = True
        for clique in _cliques(adj, k):
            if checks >= max_checks:
                all_checked = False
                break
            checks += 1
            states = S[list(clique)]
            meas = find_distinguishing_measurement(states, space, tol)
            if meas:
                r = distinguishing_residual(meas, states, space)
                return CapacityCertificate(
                    tuple(StateVector(s) for s in states), meas, k, r,
                    upper_bound_certified=exhausted_above or k == S.shape[0],
                    pool_size=S.shape[0],
                )
        exhausted_above = all_checked
    raise SolverError("no state is distinguishable from itself; capacity search failed")


# -------------------------------------------------------------- tight effect


def find_tight_effect(space: StateSpace, psi, tol: float = DEFAULT_TOL) -> "Effect | Infeasible":
    """Effect equal to 1 on ``psi`` whose minimum over the space is 0."""
    v = as_coords(psi)
    space.check_length(v)
    if isinstance(space, BallSpace):
        b = space.to_bloch(v)
        r = float(np.linalg.norm(b))
        if abs(r - 1.0) <= tol:
            return space.effect_from_bloch(0.5, 0.5 * b / r)
        cert = _ball_interior_certificate(space, b, tol)
        return Infeasible("state lies in the interior of the ball", cert, {"bloch_norm": r})
    if isinstance(space, QuantumSpace):
        rho = space.to_operator(v)
        w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if w[0] > tol:
            return Infeasible("density operator has full rank", {"min_eigenvalue": float(w[0])})
        return space.effect_from_operator(_support_projector(rho, max(tol, 1e-10)))
    if isinstance(space, VertexSpace):
        return _vertex_tight(space.vertices, v, tol)
    raise DomainError(f"unsupported space representation {space.rep!r}")


def _vertex_tight(V: np.ndarray, v: np.ndarray, tol: float):
    size = V.shape[1]
    cons = [(v, "==", 1.0)]
    cons += [(x, ">=", 0.0) for x in V]
    cons += [(x, "<=", 1.0) for x in V]
    p = LPProblem(V.sum(axis=0), cons, [(None, None)] * size)
    res = solve(p, tol=tol)
    if not res.optimal:
        return Infeasible("no valid effect reaches 1 on this state", res.farkas)
    e = res.x
    vals = V @ e
    lo = float(vals.min())
    if lo > tol:
        return Infeasible("every valid effect that is 1 here is 1 everywhere",
                          {"min_value": lo, "lp_value": res.value})
    return Effect(e)


def _ball_interior_certificate(space: BallSpace, b: np.ndarray, tol: float) -> dict[str, Any]:
    pts = fibonacci_sphere(96 if space.dim <= 3 else 160, space.dim)
    V = np.array([space.from_bloch(x) for x in pts])
    v = space.from_bloch(b)
    res = solve(LPProblem(V.sum(axis=0),
                          [(v, "==", 1.0)] + [(x, ">=", 0.0) for x in V] + [(x, "<=", 1.0) for x in V],
                          [(None, None)] * space.size), tol=tol)
    if not res.optimal:
        return {"inscribed_points": len(V), "lp_status": res.status}
    return {"inscribed_points": len(V), "lp_status": res.status,
            "min_value_on_points": float((V @ res.x).min())}


# ------------------------------------------------------- relative interior


def is_completely_mixed(space: StateSpace, psi, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``psi`` lies in the relative interior of the space."""
    v = as_coords(psi)
    space.check_length(v)
    if isinstance(space, BallSpace):
        return bool(np.linalg.norm(space.to_bloch(v)) < 1.0 - tol)
    if isinstance(space, QuantumSpace):
        rho = space.to_operator(v)
        return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] > tol)
    if isinstance(space, VertexSpace):
        V = space.vertices
        n = V.shape[0]
        # maximize t with every convex weight >= t
        obj = np.zeros(n + 1)
        obj[-1] = 1.0
        cons = [(np.concatenate([V[:, k], [0.0]]), "==", v[k]) for k in range(space.size)]
        for i in range(n):
            row = np.zeros(n + 1)
            row[i], row[-1] = 1.0, -1.0
            cons.append((row, ">=", 0.0))
        bounds = [(0.0, None)] * n + [(None, 1.0)]
        res = solve(LPProblem(obj, cons, bounds, maximize=True), tol=tol)
        return bool(res.optimal and res.value > tol)
    raise DomainError(f"unsupported space representation {space.rep!r}")


# ------------------------------------------------------- vertex enumeration


def enumerate_vertices(A: np.ndarray, b: np.ndarray, tol: float = 1e-9,
                       equalities: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """Vertices of ``{x : A x <= b}`` (optionally with ``E x == f``) by active sets.

    Exponential in the number of rows; intended for the small polytopes of
    desk-scale theories.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n = A.shape[1]
    E = np.zeros((0, n)) if equalities is None else np.atleast_2d(equalities[0])
    f = np.zeros(0) if equalities is None else np.asarray(equalities[1], dtype=float)
    need = n - np.linalg.matrix_rank(E) if E.size else n
    found: list[np.ndarray] = []
    for rows in itertools.combinations(range(A.shape[0]), need):
        M = np.vstack([E, A[list(rows)]])
        rhs = np.concatenate([f, b[list(rows)]])
        if np.linalg.matrix_rank(M) < n:
            continue
        x = np.linalg.lstsq(M, rhs, rcond=None)[0]
        if np.max(np.abs(M @ x - rhs)) > tol:
            continue
        if np.all(A @ x <= b + tol) and not any(np.max(np.abs(x - y)) <= 1e-7 for y in found):
            found.append(x)
    return np.array(found).reshape(len(found), n)


def effect_polytope_vertices(space: VertexSpace, tol: float = 1e-9) -> np.ndarray:
    """Extreme effects ``{e : 0 <= V e <= 1}`` of a polytope state space."""
    if not isinstance(space, VertexSpace):
        raise DomainError("effect polytope enumeration needs a vertex-list space")
    V = space.vertices
    A = np.vstack([V, -V])
    b = np.concatenate([np.ones(len(V)), np.zeros(len(V))])
    return enumerate_vertices(A, b, tol)
