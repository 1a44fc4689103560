"""Transformation groups: sampling, averaging, orthogonalization and orbits.

Groups are described abstractly by :class:`GroupSpec`. Finite groups carry
their elements as matrices in standard coordinates. Named continuous groups
(SO(n), O(n), SU(n) in its real 2n-dimensional form, and SU(c) acting by
conjugation) produce abstract elements that a state space turns into
standard-coordinate matrices via ``space.represent``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.linalg import sqrtm
from scipy.stats import ortho_group, special_ortho_group, unitary_group

from .core import (
    DEFAULT_TOL,
    LINALG_TOL,
    BallSpace,
    ConvergenceError,
    DimensionError,
    DomainError,
    LinearMap,
    QuantumSpace,
    StateSpace,
    StateVector,
    TheoryInstance,
    VertexSpace,
    as_coords,
)

__all__ = [
    "GroupSpec",
    "OrbitSpanReport",
    "MixedStateEstimate",
    "TransitivityVerdict",
    "PseudoGateReport",
    "haar_so",
    "haar_o",
    "haar_su",
    "su_real_rep",
    "aligning_rotation",
    "maximally_mixed",
    "estimate_maximally_mixed",
    "invariant_candidates",
    "verify_unique_invariant",
    "orthogonalize",
    "orthogonality_residual",
    "conjugated_rotation_group",
    "transitivity_audit",
    "orbit_span_rank",
    "numerical_rank",
    "su3_block_orbit_rank",
    "invariant_block_sizes",
    "verify_pseudo_gates",
    "two_gbit_norm_preservation",
]

KINDS = ("finite-list", "generated", "named-continuous", "product")
NAMED = ("SO", "O", "SU-real", "SU-conj")


# ------------------------------------------------------------------ sampling


def haar_so(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    return special_ortho_group.rvs(n, random_state=rng)


def haar_o(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.array([[rng.choice([-1.0, 1.0])]])
    return ortho_group.rvs(n, random_state=rng)


def haar_su(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    U = unitary_group.rvs(n, random_state=rng)
    return U * np.linalg.det(U) ** (-1.0 / n)


def su_real_rep(U) -> np.ndarray:
    """Real ``2n x 2n`` form ``[[re U, im U], [-im U, re U]]``."""
    U = np.asarray(U, dtype=complex)
    A, B = U.real, U.imag
    return np.block([[A, B], [-B, A]])


def aligning_rotation(x, y) -> np.ndarray | None:
    """Rotation in SO(n) sending unit vector ``x`` to unit vector ``y``.

    Returns ``None`` when no rotation exists, which only happens for
    ``n = 1`` and ``x = -y``.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = x.size
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    if np.allclose(x, y, atol=1e-15):
        return np.eye(n)
    if n == 1:
        return None
    w = x - y
    H1 = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    # second reflection fixes y and restores det +1
    z = np.zeros(n)
    k = int(np.argmin(np.abs(y)))
    z[k] = 1.0
    z -= (z @ y) * y
    z /= np.linalg.norm(z)
    H2 = np.eye(n) - 2.0 * np.outer(z, z)
    return H2 @ H1


# ----------------------------------------------------------------- GroupSpec


def _key(M: np.ndarray, decimals: int = 8) -> bytes:
    # adding 0.0 turns -0.0 into 0.0 so equal matrices share a key
    return (np.round(M, decimals) + 0.0).tobytes()


@dataclass(eq=False)
class GroupSpec:
    """Description of a transformation group.

    ``finite-list`` and ``generated`` groups hold standard-coordinate matrices.
    ``named-continuous`` groups are sampled and mapped into the space.
    ``product`` groups act independently on the two factors of a composite.
    """

    kind: str
    elements: tuple[np.ndarray, ...] = ()
    generators: tuple[np.ndarray, ...] = ()
    cap: int = 20000
    named: str | None = None
    degree: int | None = None
    seed: int = 0
    parts: tuple[Any, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DomainError(f"unknown group kind {self.kind!r}")
        self.elements = tuple(np.asarray(e, dtype=float) for e in self.elements)
        self.generators = tuple(np.asarray(g, dtype=float) for g in self.generators)
        if self.kind == "finite-list" and not self.elements:
            raise DomainError("finite-list group needs at least one element")
        if self.kind == "generated" and not self.generators:
            raise DomainError("generated group needs at least one generator")
        if self.kind == "named-continuous":
            if self.named not in NAMED:
                raise DomainError(f"unknown named group {self.named!r}")
            if self.degree is None or self.degree < 1:
                raise DomainError("named group needs a positive degree")
        if self.kind == "product" and len(self.parts) != 4:
            raise DomainError("product group needs (groupA, spaceA, groupB, spaceB)")
        self._closure: tuple[np.ndarray, ...] | None = None
        if self.kind == "finite-list" and not self.is_closed():
            raise DomainError("finite-list elements are not closed under products and inverses")

    # constructors
    @classmethod
    def finite(cls, elements: Sequence, **kw) -> "GroupSpec":
        return cls("finite-list", elements=tuple(elements), **kw)

    @classmethod
    def generated_by(cls, generators: Sequence, cap: int = 20000, **kw) -> "GroupSpec":
        return cls("generated", generators=tuple(generators), cap=cap, **kw)

    @classmethod
    def named_group(cls, named: str, degree: int, seed: int = 0) -> "GroupSpec":
        return cls("named-continuous", named=named, degree=degree, seed=seed)

    @classmethod
    def product_of(cls, gA: "GroupSpec", spaceA: StateSpace,
                   gB: "GroupSpec", spaceB: StateSpace) -> "GroupSpec":
        return cls("product", parts=(gA, spaceA, gB, spaceB))

    @classmethod
    def trivial(cls, size: int) -> "GroupSpec":
        return cls.finite([np.eye(size)])

    @property
    def is_finite(self) -> bool:
        if self.kind == "product":
            return self.parts[0].is_finite and self.parts[2].is_finite
        return self.kind in ("finite-list", "generated")

    @property
    def has_continuous_part(self) -> bool:
        """Whether the group contains a non-trivial connected component of the identity."""
        if self.kind == "product":
            return self.parts[0].has_continuous_part or self.parts[2].has_continuous_part
        if self.kind != "named-continuous":
            return False
        return self.degree >= 2

    def closure(self) -> tuple[np.ndarray, ...]:
        """All elements of a finite group, closing the generators under products."""
        if self._closure is not None:
            return self._closure
        if self.kind == "finite-list":
            self._closure = self.elements
        elif self.kind == "generated":
            gens = self.generators
            n = gens[0].shape[0]
            ident = np.eye(n)
            seen = {_key(ident): ident}
            queue = deque([ident])
            while queue:
                g = queue.popleft()
                for h in gens:
                    m = h @ g
                    k = _key(m)
                    if k not in seen:
                        if len(seen) >= self.cap:
                            raise DomainError(
                                f"group closure exceeds cap {self.cap}; not finite at this resolution"
                            )
                        seen[k] = m
                        queue.append(m)
            self._closure = tuple(seen.values())
        elif self.kind == "product" and self.is_finite:
            gA, _, gB, _ = self.parts
            self._closure = tuple(np.kron(a, b) for a in gA.closure() for b in gB.closure())
        else:
            raise DomainError("continuous groups have no finite closure")
        return self._closure

    def order(self) -> int:
        return len(self.closure())

    def is_closed(self, tol: float = 1e-8) -> bool:
        """Check closure under products and inverses of a finite element list."""
        els = self.closure()
        keys = {_key(e) for e in els}
        for a in els:
            if _key(np.linalg.inv(a)) not in keys:
                return False
            for b in els:
                if _key(a @ b) not in keys:
                    return False
        return True

    def sample_abstract(self, rng: np.random.Generator, n: int) -> list[np.ndarray]:
        if self.kind != "named-continuous":
            raise DomainError("abstract samples exist only for named groups")
        d = self.degree
        if self.named == "SO":
            return [haar_so(d, rng) for _ in range(n)]
        if self.named == "O":
            return [haar_o(d, rng) for _ in range(n)]
        if self.named == "SU-real":
            return [su_real_rep(haar_su(d, rng)) for _ in range(n)]
        return [haar_su(d, rng) for _ in range(n)]

    def sample(self, space: StateSpace, rng: np.random.Generator, n: int) -> list[np.ndarray]:
        """``n`` group elements as standard-coordinate matrices on ``space``."""
        if self.kind == "product":
            gA, sA, gB, sB = self.parts
            a = gA.sample(sA, rng, n)
            b = gB.sample(sB, rng, n)
            return [np.kron(x, y) for x, y in zip(a, b)]
        if self.is_finite:
            els = self.closure()
            idx = rng.integers(0, len(els), size=n)
            return [space.represent(els[i]) for i in idx]
        return [space.represent(g) for g in self.sample_abstract(rng, n)]

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "named-continuous":
            out.update(named=self.named, degree=self.degree)
        elif self.kind == "product":
            out["parts"] = [self.parts[0].describe(), self.parts[2].describe()]
        else:
            out["order"] = self.order()
        out["continuous"] = self.has_continuous_part
        return out


# ---------------------------------------------------------- maximally mixed


@dataclass
class MixedStateEstimate:
    state: StateVector
    method: str
    monte_carlo: np.ndarray | None = None
    stderr: np.ndarray | None = None
    max_z: float = 0.0
    invariance_residual: float = 0.0
    n_samples: int = 0


def _closed_form_mu(space: StateSpace) -> np.ndarray | None:
    if isinstance(space, BallSpace):
        return space.mu
    if isinstance(space, QuantumSpace):
        return space.from_operator(np.eye(space.c) / space.c)
    return None


def _closed_form_for(instance: TheoryInstance) -> np.ndarray | None:
    g = instance.group
    space = instance.space
    if g is None:
        return None
    if g.kind == "product":
        gA, sA, gB, sB = g.parts
        a = _closed_form_mu(sA) if not gA.is_finite else None
        b = _closed_form_mu(sB) if not gB.is_finite else None
        if a is not None and b is not None:
            return np.kron(a, b)
        return None
    if g.kind == "named-continuous":
        return _closed_form_mu(space)
    return None


def estimate_maximally_mixed(instance: TheoryInstance, n_samples: int = 4000,
                             seed: int = 0, n_check: int = 100) -> MixedStateEstimate:
    """Group average of a pure state, with Monte Carlo error bars.

    Finite groups are averaged exactly over all elements. Continuous groups use
    the closed form where the symmetry fixes it, cross-checked against a
    Monte Carlo orbit average; without a closed form the Monte Carlo mean is
    returned and tested for invariance.
    """
    g = instance.group
    if g is None:
        raise DomainError(f"instance {instance.name} has no transformation group")
    space = instance.space
    rng = np.random.default_rng(seed)
    psi0 = space.sample_pure(rng, 1)[0]

    if g.is_finite:
        els = [space.represent(e) if g.kind != "product" else e for e in g.closure()]
        mu = np.mean([e @ psi0 for e in els], axis=0)
        mu[0] = 1.0
        resid = max(float(np.max(np.abs(e @ mu - mu))) for e in els)
        return MixedStateEstimate(StateVector(mu), "exact-orbit", invariance_residual=resid,
                                  n_samples=len(els))

    orbit = np.array([G @ psi0 for G in g.sample(space, rng, n_samples)])
    mc = orbit.mean(axis=0)
    stderr = orbit.std(axis=0, ddof=1) / np.sqrt(n_samples)
    closed = _closed_form_for(instance)
    checks = g.sample(space, rng, n_check)
    if closed is not None:
        safe = np.where(stderr[1:] > 0, stderr[1:], np.inf)
        z = np.abs(mc[1:] - closed[1:]) / safe
        max_z = float(np.max(z, initial=0.0))
        if max_z > 6.0:
            raise ConvergenceError(f"Monte Carlo average is {max_z:.2f} standard errors from the closed form")
        resid = max(float(np.max(np.abs(G @ closed - closed))) for G in checks)
        return MixedStateEstimate(StateVector(closed), "closed-form", mc, stderr, max_z, resid, n_samples)
    mc[0] = 1.0
    resid = max(float(np.max(np.abs(G @ mc - mc))) for G in checks)
    bound = 10.0 * float(np.max(stderr[1:], initial=0.0)) * 2.0 + LINALG_TOL
    if resid > bound:
        raise ConvergenceError(f"Monte Carlo average moves by {resid:.3e} under the group (bound {bound:.3e})")
    return MixedStateEstimate(StateVector(mc), "monte-carlo", mc, stderr, 0.0, resid, n_samples)


def maximally_mixed(instance: TheoryInstance, n_samples: int = 4000, seed: int = 0) -> StateVector:
    """The group-invariant state obtained by averaging a pure state's orbit."""
    return estimate_maximally_mixed(instance, n_samples, seed).state


def _group_matrices(instance: TheoryInstance, rng, n: int) -> list[np.ndarray]:
    g = instance.group
    if g.is_finite:
        return [instance.space.represent(e) if g.kind != "product" else e for e in g.closure()]
    return g.sample(instance.space, rng, n)


def invariant_candidates(instance: TheoryInstance, candidates: Sequence,
                         n_group: int = 100, seed: int = 0, tol: float = 1e-9) -> list[int]:
    """Indices of candidates left fixed by every (sampled) group element."""
    rng = np.random.default_rng(seed)
    mats = _group_matrices(instance, rng, n_group)
    out = []
    for i, c in enumerate(candidates):
        v = as_coords(c)
        if all(np.max(np.abs(G @ v - v)) <= tol for G in mats):
            out.append(i)
    return out


def verify_unique_invariant(instance: TheoryInstance, candidates: Sequence,
                            n_group: int = 100, seed: int = 0, tol: float = 1e-9) -> bool:
    """True iff exactly one distinct candidate is invariant and it is the
    maximally mixed state."""
    fixed = invariant_candidates(instance, candidates, n_group, seed, tol)
    if not fixed:
        return False
    pts = [as_coords(candidates[i]) for i in fixed]
    if any(np.max(np.abs(p - pts[0])) > tol for p in pts[1:]):
        return False
    mu = maximally_mixed(instance, seed=seed).coords
    return bool(np.max(np.abs(pts[0] - mu)) <= max(tol, 1e-9))


# ------------------------------------------------------------ orthogonalize


def orthogonality_residual(S, elements: Sequence) -> float:
    S = S.matrix if isinstance(S, LinearMap) else np.asarray(S, dtype=float)
    Sinv = np.linalg.inv(S)
    worst = 0.0
    for G in elements:
        H = S @ np.asarray(G, dtype=float) @ Sinv
        worst = max(worst, float(np.max(np.abs(H.T @ H - np.eye(H.shape[0])))))
    return worst


def orthogonalize(group: "GroupSpec | Sequence", tol: float = 1e-9) -> LinearMap:
    """Symmetric ``S > 0`` making every ``S G S^-1`` orthogonal.

    ``S`` is the principal square root of the group average of ``G^T G``.
    Finite groups give an exact average; the residual is checked against
    ``tol`` and a :class:`ConvergenceError` raised if it is exceeded.
    """
    elements = group.closure() if isinstance(group, GroupSpec) else [np.asarray(g, float) for g in group]
    if not elements:
        raise DomainError("no group elements to average")
    P = np.mean([G.T @ G for G in elements], axis=0)
    P = 0.5 * (P + P.T)
    w = np.linalg.eigvalsh(P)
    if w[0] <= 1e-12 * max(1.0, w[-1]):
        raise DomainError(f"averaged Gram matrix is singular (min eigenvalue {w[0]:.3e})")
    S = np.real(sqrtm(P))
    S = 0.5 * (S + S.T)
    resid = orthogonality_residual(S, elements)
    if resid > tol:
        raise ConvergenceError(f"orthogonalized elements deviate by {resid:.3e}")
    return LinearMap(S)


def conjugated_rotation_group(n: int = 64, M=None) -> list[np.ndarray]:
    """The cyclic group of ``n`` plane rotations conjugated by ``M``."""
    M = np.diag([1.0, 2.0]) if M is None else np.asarray(M, dtype=float)
    Minv = np.linalg.inv(M)
    out = []
    for k in range(n):
        t = 2 * np.pi * k / n
        R = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        out.append(M @ R @ Minv)
    return out


# ------------------------------------------------------------- transitivity


@dataclass
class TransitivityVerdict:
    verdict: str
    method: str
    pairs_checked: int
    max_residual: float = 0.0
    witness: dict[str, Any] | None = None
    continuous: bool = False

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


def _align_in_space(group: GroupSpec, space: StateSpace, x: np.ndarray, y: np.ndarray):
    """Standard-coordinate group element mapping pure ``x`` to pure ``y``."""
    if group.kind == "product":
        gA, sA, gB, sB = group.parts
        nA, nB = sA.size, sB.size
        xa, xb = x.reshape(nA, nB)[:, 0], x.reshape(nA, nB)[0]
        ya, yb = y.reshape(nA, nB)[:, 0], y.reshape(nA, nB)[0]
        ga = _align_in_space(gA, sA, xa, ya)
        gb = _align_in_space(gB, sB, xb, yb)
        if ga is None or gb is None:
            return None
        return np.kron(ga, gb)
    if isinstance(space, BallSpace) and group.named in ("SO", "O"):
        bx, by = space.to_bloch(x), space.to_bloch(y)
        R = aligning_rotation(bx, by)
        if R is None and group.named == "O":
            R = -np.eye(1)
        return None if R is None else space.represent(R)
    if isinstance(space, BallSpace) and group.named == "SU-real":
        # complex coordinates k = x1 - i x2 match the real form's action
        n = group.degree
        bx, by = space.to_bloch(x), space.to_bloch(y)
        U = exact_su_alignment(bx[:n] - 1j * bx[n:], by[:n] - 1j * by[n:])
        return None if U is None else space.represent(su_real_rep(U))
    if isinstance(space, QuantumSpace) and group.named == "SU-conj":
        from .hermitian import aligning_unitary, top_ket

        kx = top_ket(space.to_operator(x))
        ky = top_ket(space.to_operator(y))
        return space.represent(aligning_unitary(kx, ky))
    raise DomainError(f"no constructive alignment for {group.named} on {space.rep}")


def exact_su_alignment(kx, ky) -> np.ndarray | None:
    """``U`` in SU(n) with ``U kx == ky`` exactly (no phase), or ``None`` when
    ``n = 1`` and the kets differ."""
    from .hermitian import aligning_unitary

    kx = np.asarray(kx, dtype=complex) / np.linalg.norm(kx)
    ky = np.asarray(ky, dtype=complex) / np.linalg.norm(ky)
    n = kx.size
    if n == 1:
        return np.eye(1, dtype=complex) if abs(kx[0] - ky[0]) < 1e-12 else None
    U = aligning_unitary(kx, ky)
    phase = np.vdot(ky, U @ kx)
    phase /= abs(phase)
    # undo the phase on ky and restore det 1 on a direction orthogonal to ky
    e = np.zeros(n, dtype=complex)
    e[int(np.argmin(np.abs(ky)))] = 1.0
    z = e - np.vdot(ky, e) * ky
    z /= np.linalg.norm(z)
    D = (np.eye(n, dtype=complex)
         + (np.conj(phase) - 1.0) * np.outer(ky, ky.conj())
         + (phase - 1.0) * np.outer(z, z.conj()))
    U = D @ U
    return U


def transitivity_audit(instance: TheoryInstance, n_pairs: int = 20, seed: int = 0,
                       tol: float = 1e-9) -> TransitivityVerdict:
    """Check that every pure state can be mapped onto every other one.

    Finite groups: exact orbit of the first vertex. Continuous groups: for
    each sampled pair an explicit aligning element is built and applied.
    """
    g, space = instance.group, instance.space
    if g is None:
        return TransitivityVerdict("NOT-APPLICABLE", "no-group", 0)
    if g.is_finite and isinstance(space, VertexSpace):
        V = space.vertices
        mats = [space.represent(e) if g.kind != "product" else e for e in g.closure()]
        reached: set[int] = set()
        for G in mats:
            img = G @ V[0]
            dists = np.max(np.abs(V - img), axis=1)
            j = int(np.argmin(dists))
            if dists[j] <= tol:
                reached.add(j)
        missing = [j for j in range(len(V)) if j not in reached]
        if missing:
            j = missing[0]
            witness = {"from_index": 0, "to_index": j,
                       "from": V[0].tolist(), "to": V[j].tolist(),
                       "orbit_size": len(reached), "group_order": len(mats)}
            return TransitivityVerdict("FAIL", "finite-orbit", len(V) - 1, witness=witness)
        return TransitivityVerdict("PASS", "finite-orbit", len(V) - 1)

    rng = np.random.default_rng(seed)
    xs = space.sample_pure(rng, n_pairs)
    ys = space.sample_pure(rng, n_pairs)
    if isinstance(space, BallSpace) and space.dim == 1:
        # the 0-sphere has two points; test the antipodal pair explicitly
        xs = np.array([space.from_bloch([1.0])] * n_pairs)
        ys = np.array([space.from_bloch([-1.0])] * n_pairs)
    worst = 0.0
    for x, y in zip(xs, ys):
        G = _align_in_space(g, space, x, y)
        if G is None:
            return TransitivityVerdict("FAIL", "constructive", n_pairs,
                                       witness={"from": x.tolist(), "to": y.tolist()},
                                       continuous=g.has_continuous_part)
        r = float(np.max(np.abs(G @ x - y)))
        worst = max(worst, r)
        if r > tol:
            return TransitivityVerdict("FAIL", "constructive", n_pairs, r,
                                       witness={"from": x.tolist(), "to": y.tolist(), "residual": r},
                                       continuous=g.has_continuous_part)
    return TransitivityVerdict("PASS", "constructive", n_pairs, worst,
                               continuous=g.has_continuous_part)


# ---------------------------------------------------------------- orbit span


@dataclass
class OrbitSpanReport:
    d2: int
    seed_class: str
    samples: int
    rank: int
    singular_value_gap: float
    verdict: str = "OK"
    singular_values: list[float] = field(default_factory=list)
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rank > self.samples:
            raise DomainError("rank cannot exceed the number of samples")


def numerical_rank(M: np.ndarray, rel: float = 1e-8, min_gap: float = 1e3) -> tuple[int, float, np.ndarray, bool]:
    """Rank with threshold ``rel * s_max``; also the gap ratio and whether it
    is large enough to trust."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, float("inf"), s, True
    r = int(np.sum(s > rel * s[0]))
    if r == s.size:
        gap = float("inf")
    else:
        below = s[r]
        gap = float("inf") if below == 0.0 else float(s[r - 1] / below)
    return r, gap, s, gap >= min_gap


SEED_CLASSES = ("rotation", "reflection", "generic", "vector")


def orbit_span_rank(d2: int, seed_class: str, n_samples: int | None = None,
                    seed: int = 0, v: float | None = None) -> OrbitSpanReport:
    """Rank of the linear span of ``{H_A Cbar H_B^T}`` (or ``{H abar}``) for
    ``H_A, H_B`` drawn from SO(d2 - 1)."""
    if d2 < 3 or d2 % 2 == 0:
        raise DomainError(f"d2 must be odd and at least 3, got {d2}")
    if seed_class not in SEED_CLASSES:
        raise DomainError(f"unknown seed class {seed_class!r}")
    m = d2 - 1
    need = m * m + 8
    n_samples = need if n_samples is None else n_samples
    if n_samples < need:
        raise DomainError(f"need at least {need} samples, got {n_samples}")
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0, 2 * np.pi) if v is None else v
    if seed_class in ("rotation", "reflection"):
        if m != 2:
            raise DomainError("rotation/reflection seeds are 2x2; use d2 = 3")
        from .bloch import reflection_seed, rotation_seed

        Cbar = rotation_seed(angle) if seed_class == "rotation" else reflection_seed(angle)
    elif seed_class == "generic":
        Cbar = rng.standard_normal((m, m))
    else:
        a = rng.standard_normal(m)
        Cbar = a / np.linalg.norm(a)
    rows = []
    for _ in range(n_samples):
        HA = haar_so(m, rng)
        if seed_class == "vector":
            rows.append(HA @ Cbar)
        else:
            HB = haar_so(m, rng)
            rows.append((HA @ Cbar @ HB.T).ravel())
    r, gap, s, ok = numerical_rank(np.array(rows))
    return OrbitSpanReport(d2, seed_class, n_samples, r, gap, "OK" if ok else "AMBIGUOUS",
                           [float(x) for x in s])


def _commutant(mats: Sequence[np.ndarray], rel: float = 1e-9) -> np.ndarray:
    """Basis (as matrices) of the matrices commuting with every element."""
    n = mats[0].shape[0]
    eye = np.eye(n)
    # vec(G X - X G) = (I kron G - G^T kron I) vec(X) for column-major vec
    rows = [np.kron(eye, G) - np.kron(G.T, eye) for G in mats]
    A = np.vstack(rows)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    tol = rel * max(1.0, s[0])
    null = Vt[np.sum(s > tol):]
    return np.array([x.reshape(n, n, order="F") for x in null])


def invariant_block_sizes(mats: Sequence[np.ndarray], rng: np.random.Generator,
                          tol: float = 1e-6) -> list[int]:
    """Sizes of the eigenspaces of a random symmetric commutant element.

    For an orthogonal representation these are invariant subspaces, and for a
    generic element they are the finest decomposition the commutant allows.
    """
    comm = _commutant(mats)
    X = np.tensordot(rng.standard_normal(len(comm)), comm, axes=1)
    X = 0.5 * (X + X.T)
    w = np.sort(np.linalg.eigvalsh(X))
    scale = max(1.0, float(np.max(np.abs(w))))
    sizes, start = [], 0
    for i in range(1, w.size + 1):
        if i == w.size or w[i] - w[i - 1] > tol * scale:
            sizes.append(i - start)
            start = i
    return sorted(sizes)


def su3_block_orbit_rank(n_samples: int = 48, seed: int = 0) -> OrbitSpanReport:
    """SU(3) acting on R^6 through its real form, and the SO(3) subgroup.

    Reports the orbit-span rank of a generic ``Cbar`` under the SO(3)
    subgroup acting on both sides, plus the invariant-block sizes of the
    product representations of SU(3) and of the SO(3) subgroup.
    """
    rng = np.random.default_rng(seed)
    Us = [haar_su(3, rng) for _ in range(n_samples)]
    Hs = [su_real_rep(U) for U in Us]
    orth = max(float(np.max(np.abs(H.T @ H - np.eye(6)))) for H in Hs)
    hom = 0.0
    for U, V in zip(Us[::2], Us[1::2]):
        hom = max(hom, float(np.max(np.abs(su_real_rep(U @ V) - su_real_rep(U) @ su_real_rep(V)))))

    so3 = [su_real_rep(haar_so(3, rng).astype(complex)) for _ in range(n_samples)]
    Cbar = rng.standard_normal((6, 6))
    rows = []
    for _ in range(n_samples):
        i, j = rng.integers(0, n_samples, size=2)
        rows.append((so3[i] @ Cbar @ so3[j].T).ravel())
    r, gap, s, ok = numerical_rank(np.array(rows))

    prod_su3 = [np.kron(Hs[0], Hs[1]), np.kron(Hs[2], Hs[3]), np.kron(Hs[4], Hs[5])]
    prod_so3 = [np.kron(so3[0], so3[1]), np.kron(so3[2], so3[3]), np.kron(so3[4], so3[5])]
    su3_blocks = invariant_block_sizes(prod_su3, rng)
    so3_blocks = invariant_block_sizes(prod_so3, rng)
    extras = {
        "orthogonality_residual": orth,
        "homomorphism_residual": hom,
        "su3_product_blocks": su3_blocks,
        "so3_subgroup_blocks": so3_blocks,
        "min_invariant_dim": min(so3_blocks),
    }
    return OrbitSpanReport(7, "su3-subgroup", n_samples, r, gap, "OK" if ok else "AMBIGUOUS",
                           [float(x) for x in s], extras)


# -------------------------------------------------------------- pseudo-gates


@dataclass
class PseudoGateReport:
    ok: bool
    swap_residual: float
    cnot_residual: float
    mu_residual: float
    swap: np.ndarray
    cnot: np.ndarray
    tol: float

    @property
    def residual(self) -> float:
        return max(self.swap_residual, self.cnot_residual)


_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def verify_pseudo_gates(composite, phi0, phi1, tol: float = LINALG_TOL) -> PseudoGateReport:
    """Exhibit the swap and controlled-not transformations relative to the
    distinguishable pair ``(phi0, phi1)`` and check them on all four products.

    ``composite`` must be a two-qubit composite whose joint space is a
    :class:`QuantumSpace` built from the part frames.
    """
    from .hermitian import top_ket

    joint = composite.joint
    partA = composite.partA
    if not isinstance(joint, QuantumSpace) or not isinstance(partA, QuantumSpace) or partA.c != 2:
        raise DomainError("pseudo-gates are constructed for the two-qubit composite")
    p0, p1 = as_coords(phi0), as_coords(phi1)
    k0 = top_ket(partA.to_operator(p0))
    k1 = top_ket(partA.to_operator(p1))
    if abs(np.vdot(k0, k1)) > 1e-9:
        raise DomainError("phi0 and phi1 are not perfectly distinguishable")
    V = np.column_stack([k0, k1])
    W = np.kron(V, V)
    swap_u = W @ _SWAP @ W.conj().T
    cnot_u = W @ _CNOT @ W.conj().T
    Gs, Gc = joint.represent(swap_u), joint.represent(cnot_u)
    phis = [p0, p1]
    sr = cr = 0.0
    for a in (0, 1):
        for b in (0, 1):
            inp = np.kron(phis[a], phis[b])
            sr = max(sr, float(np.max(np.abs(Gs @ inp - np.kron(phis[b], phis[a])))))
            cr = max(cr, float(np.max(np.abs(Gc @ inp - np.kron(phis[a], phis[a ^ b])))))
    mu = joint.from_operator(np.eye(4) / 4)
    mr = max(float(np.max(np.abs(Gs @ mu - mu))), float(np.max(np.abs(Gc @ mu - mu))))
    ok = sr <= tol and cr <= tol and mr <= tol
    return PseudoGateReport(ok, sr, cr, mr, Gs, Gc, tol)


def two_gbit_norm_preservation(composite, n: int = 200, seed: int = 0) -> float:
    """Largest change of ``|[alpha, beta, C]|`` under random two-gbit group
    elements built from local rotations and the pseudo-gates."""
    from .bloch import two_gbit_bloch
    from .hermitian import su2_to_so3

    rng = np.random.default_rng(seed)
    joint, A = composite.joint, composite.partA
    mu = np.full(4, 0.5)
    mu[0] = 1.0
    phi0 = A.from_operator(np.diag([1.0, 0.0]))
    phi1 = A.from_operator(np.diag([0.0, 1.0]))
    gates = verify_pseudo_gates(composite, phi0, phi1, tol=1e-9)
    ball = BallSpace(3)
    worst = 0.0
    states = joint.sample_pure(rng, n)
    for psi in states:
        G = np.eye(16)
        for _ in range(3):
            RA = su2_to_so3(haar_su(2, rng)).matrix
            RB = su2_to_so3(haar_su(2, rng)).matrix
            G = np.kron(ball.represent(RA), ball.represent(RB)) @ G
            G = (gates.swap if rng.random() < 0.5 else gates.cnot) @ G
        before = two_gbit_bloch(psi).norm_sq
        after = two_gbit_bloch(G @ psi).norm_sq
        worst = max(worst, abs(before - after))
    return worst
