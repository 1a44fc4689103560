"""Domain types shared across the toolkit.

States live in the redundant-coordinate representation: a state of a system
with ``d`` fiducial outcomes is the vector ``(1, p_1, ..., p_d)``. Effects are
dual vectors applied by a dot product, so the unit effect is ``(1, 0, ..., 0)``.
Keeping the leading 1 makes product states plain Kronecker products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .simplex import LPProblem, SolverError, solve

__all__ = [
    "DEFAULT_TOL",
    "LINALG_TOL",
    "GPTError",
    "DimensionError",
    "DomainError",
    "UnsupportedRepresentation",
    "SolverError",
    "ConvergenceError",
    "StateVector",
    "Effect",
    "Measurement",
    "LinearMap",
    "StateSpace",
    "VertexSpace",
    "BallSpace",
    "QuantumSpace",
    "ProductHullSpace",
    "TheoryInstance",
    "CapacityCertificate",
    "unit_effect",
    "evaluate_effect",
    "is_member",
    "mix",
    "as_state",
    "as_coords",
    "sample_effects",
]

DEFAULT_TOL = 1e-9
LINALG_TOL = 1e-12


class GPTError(Exception):
    """Base class for toolkit errors."""


class DimensionError(GPTError, ValueError):
    pass


class DomainError(GPTError, ValueError):
    pass


class UnsupportedRepresentation(GPTError, TypeError):
    pass


class ConvergenceError(GPTError, RuntimeError):
    pass


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized state ``(1, p_1, ..., p_d)``."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.coords, dtype=float).ravel()
        if c.size == 0:
            raise DimensionError("state vector needs at least the normalization entry")
        if abs(c[0] - 1.0) > LINALG_TOL:
            raise DomainError(f"normalization entry is {c[0]!r}, expected 1")
        c[0] = 1.0
        if not np.all(np.isfinite(c)):
            raise DomainError("state vector has non-finite entries")
        object.__setattr__(self, "coords", _frozen(c))

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def __len__(self) -> int:
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StateVector) and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def __repr__(self) -> str:
        return f"StateVector({np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class Effect:
    """Linear functional ``psi -> dual @ psi.coords``."""

    dual: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.dual, dtype=float).ravel()
        object.__setattr__(self, "dual", _frozen(d))

    @property
    def dim(self) -> int:
        return self.dual.size - 1

    def __call__(self, psi: "StateVector | np.ndarray") -> float:
        return evaluate_effect(self, psi)

    def complement(self) -> "Effect":
        return Effect(unit_effect(self.dim).dual - self.dual)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Effect) and np.array_equal(self.dual, other.dual)

    def __hash__(self) -> int:
        return hash(self.dual.tobytes())

    def __repr__(self) -> str:
        return f"Effect({np.array2string(self.dual, precision=6)})"


def unit_effect(d: int) -> Effect:
    u = np.zeros(d + 1)
    u[0] = 1.0
    return Effect(u)


@dataclass(frozen=True)
class Measurement:
    """Ordered effects summing to the unit effect."""

    effects: tuple[Effect, ...]
    tol: float = LINALG_TOL

    def __post_init__(self) -> None:
        effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        if not effects:
            raise DomainError("a measurement needs at least one effect")
        dims = {e.dim for e in effects}
        if len(dims) != 1:
            raise DimensionError(f"effects have mixed dimensions {sorted(dims)}")
        dev = self.unit_deviation_of(effects)
        if dev > self.tol:
            raise DomainError(f"effects sum to the unit effect only within {dev:.3e}")
        object.__setattr__(self, "effects", effects)

    @staticmethod
    def unit_deviation_of(effects: Sequence[Effect]) -> float:
        total = np.sum([e.dual for e in effects], axis=0)
        return float(np.max(np.abs(total - unit_effect(effects[0].dim).dual)))

    @property
    def unit_deviation(self) -> float:
        return self.unit_deviation_of(self.effects)

    def __len__(self) -> int:
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)

    def __getitem__(self, i: int) -> Effect:
        return self.effects[i]

    def probabilities(self, psi: "StateVector | np.ndarray") -> np.ndarray:
        return np.array([evaluate_effect(e, psi) for e in self.effects])

    @classmethod
    def completing(cls, effects: Sequence[Effect | np.ndarray]) -> "Measurement":
        """Build a measurement whose last effect is the unit minus the others.

        Useful when effects come from a numerical solve: the sum is then exact
        up to rounding while the last effect carries the accumulated error.
        """
        effects = [e if isinstance(e, Effect) else Effect(e) for e in effects]
        head = effects[:-1]
        d = effects[-1].dim
        last = unit_effect(d).dual - np.sum([e.dual for e in head], axis=0) if head else unit_effect(d).dual
        return cls(tuple(head) + (Effect(last),))


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A real matrix acting on standard coordinates.

    Square maps flagged as transformations must keep the normalization entry,
    which means the first row is ``(1, 0, ..., 0)``.
    """

    matrix: np.ndarray
    is_transformation: bool = False

    def __post_init__(self) -> None:
        m = np.atleast_2d(np.array(self.matrix, dtype=float))
        if self.is_transformation:
            if m.shape[0] != m.shape[1]:
                raise DimensionError(f"transformation must be square, got {m.shape}")
            row0 = np.zeros(m.shape[1])
            row0[0] = 1.0
            if np.max(np.abs(m[0] - row0)) > LINALG_TOL:
                raise DomainError("transformation does not preserve the normalization entry")
            m[0] = row0
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, psi: StateVector) -> StateVector:
        v = as_coords(psi)
        if v.size != self.matrix.shape[1]:
            raise DimensionError(f"map expects length {self.matrix.shape[1]}, got {v.size}")
        return StateVector(self.matrix @ v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix @ other.matrix,
                         self.is_transformation and other.is_transformation)

    def apply_effect(self, e: Effect) -> Effect:
        """Pull an effect back through the map: ``(e o T)(psi) = e(T psi)``."""
        return Effect(e.dual @ self.matrix)


def as_coords(psi: "StateVector | np.ndarray | Sequence[float]") -> np.ndarray:
    if isinstance(psi, StateVector):
        return psi.coords
    return np.asarray(psi, dtype=float).ravel()


def as_state(psi: "StateVector | np.ndarray | Sequence[float]") -> StateVector:
    return psi if isinstance(psi, StateVector) else StateVector(psi)


def _as_dual(e: "Effect | np.ndarray") -> np.ndarray:
    return e.dual if isinstance(e, Effect) else np.asarray(e, dtype=float).ravel()


def evaluate_effect(e: "Effect | np.ndarray", psi: "StateVector | np.ndarray") -> float:
    """Probability of the outcome ``e`` on ``psi``; no clamping."""
    d, v = _as_dual(e), as_coords(psi)
    if d.size != v.size:
        raise DimensionError(f"effect has length {d.size}, state has length {v.size}")
    return float(d @ v)


def mix(psi1: StateVector, psi2: StateVector, q: float) -> StateVector:
    """Prepare ``psi1`` with probability ``q`` and ``psi2`` otherwise."""
    if not (0.0 <= q <= 1.0) or not np.isfinite(q):
        raise DomainError(f"mixing weight {q!r} is outside [0, 1]")
    a, b = as_coords(psi1), as_coords(psi2)
    if a.size != b.size:
        raise DimensionError(f"cannot mix lengths {a.size} and {b.size}")
    return StateVector(q * a + (1.0 - q) * b)


# ---------------------------------------------------------------- state spaces


class StateSpace:
    """Convex set of normalized states.

    Subclasses provide a membership oracle, the range of a linear functional
    over the set, and a source of pure states.
    """

    rep: str = "abstract"
    exact_effect_range = True

    def __init__(self, dim: int, labels: Sequence[str] | None = None):
        if dim < 0:
            raise DimensionError(f"negative dimension {dim}")
        self.dim = int(dim)
        self.labels = tuple(labels) if labels is not None else tuple(
            f"x{i}" for i in range(1, self.dim + 1)
        )

    @property
    def size(self) -> int:
        return self.dim + 1

    def unit(self) -> Effect:
        return unit_effect(self.dim)

    def check_length(self, v: np.ndarray) -> None:
        if v.size != self.size:
            raise DimensionError(f"expected length {self.size}, got {v.size}")

    def contains(self, psi, tol: float = DEFAULT_TOL) -> bool:
        raise UnsupportedRepresentation(f"{type(self).__name__} has no membership oracle")

    def effect_range(self, e) -> tuple[float, float]:
        """``(min, max)`` of the functional over the state space."""
        raise UnsupportedRepresentation(f"{type(self).__name__} has no effect range")

    def is_valid_effect(self, e, tol: float = DEFAULT_TOL) -> bool:
        lo, hi = self.effect_range(e)
        return lo >= -tol and hi <= 1.0 + tol

    def sample_pure(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` pure states as rows of standard coordinates."""
        raise UnsupportedRepresentation(f"{type(self).__name__} has no pure-state source")

    def sample_states(self, rng: np.random.Generator, n: int, k: int = 3) -> np.ndarray:
        """Random mixtures of ``k`` pure states each (Dirichlet weights)."""
        out = np.empty((n, self.size))
        for i in range(n):
            pures = self.sample_pure(rng, k)
            w = rng.dirichlet(np.ones(k))
            out[i] = w @ pures
        out[:, 0] = 1.0
        return out

    def represent(self, g) -> np.ndarray:
        """Standard-coordinate matrix of an abstract group element."""
        g = np.asarray(g, dtype=float)
        if g.shape != (self.size, self.size):
            raise DimensionError(f"group element of shape {g.shape} on a space of size {self.size}")
        return g

    def describe(self) -> dict[str, Any]:
        return {"rep": self.rep, "dim": self.dim, "labels": list(self.labels)}


class VertexSpace(StateSpace):
    """Polytope given by its finite list of pure states."""

    rep = "vertex-list"

    def __init__(self, vertices, labels: Sequence[str] | None = None):
        V = np.atleast_2d(np.array(vertices, dtype=float))
        if V.shape[0] == 0:
            raise DomainError("vertex list is empty")
        if np.max(np.abs(V[:, 0] - 1.0)) > LINALG_TOL:
            raise DomainError("vertices must have normalization entry 1")
        V[:, 0] = 1.0
        super().__init__(V.shape[1] - 1, labels)
        V.setflags(write=False)
        self.vertices = V

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def pure_states(self) -> list[StateVector]:
        return [StateVector(v) for v in self.vertices]

    def convex_weights(self, psi, tol: float = DEFAULT_TOL, exclude: int | None = None):
        """Weights ``lam >= 0`` with ``lam @ V == psi``, or ``None`` if infeasible."""
        v = as_coords(psi)
        self.check_length(v)
        idx = [i for i in range(self.n_vertices) if i != exclude]
        V = self.vertices[idx]
        p = LPProblem.from_arrays(np.zeros(len(idx)), A_eq=V.T, b_eq=v)
        res = solve(p, tol=tol)
        if not res.optimal:
            return None
        lam = np.zeros(self.n_vertices)
        lam[idx] = res.x
        return lam

    def contains(self, psi, tol: float = DEFAULT_TOL) -> bool:
        v = as_coords(psi)
        self.check_length(v)
        if np.any(np.abs(self.vertices - v).max(axis=1) <= tol):
            return True
        return self.convex_weights(v, tol) is not None

    def effect_range(self, e) -> tuple[float, float]:
        vals = self.vertices @ _as_dual(e)
        return float(vals.min()), float(vals.max())

    def sample_pure(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.vertices[rng.integers(0, self.n_vertices, size=n)].copy()

    def non_extreme_vertices(self, tol: float = DEFAULT_TOL) -> list[int]:
        """Indices of listed vertices lying in the hull of the others."""
        if self.n_vertices == 1:
            return []
        return [i for i in range(self.n_vertices)
                if self.convex_weights(self.vertices[i], tol, exclude=i) is not None]

    def describe(self) -> dict[str, Any]:
        out = super().describe()
        out["n_vertices"] = self.n_vertices
        return out


class ProductHullSpace(VertexSpace):
    """Convex hull of a finite pool of product states.

    For parts without a finite vertex list the pool is a seeded sample, so
    membership and effect ranges are inner approximations of the true hull.
    """

    rep = "product-hull"
    exact_effect_range = False

    def __init__(self, partA: StateSpace, partB: StateSpace, pool: int = 64, seed: int = 0):
        rng = np.random.default_rng(seed)
        if isinstance(partA, VertexSpace) and not isinstance(partA, ProductHullSpace):
            A = partA.vertices
        else:
            A = partA.sample_pure(rng, pool)
        if isinstance(partB, VertexSpace) and not isinstance(partB, ProductHullSpace):
            B = partB.vertices
        else:
            B = partB.sample_pure(rng, pool)
        if A.shape[0] * B.shape[0] > 4 * pool:
            # keep pool size bounded by pairing sampled rows rather than all pairs
            ia = rng.integers(0, A.shape[0], size=4 * pool)
            ib = rng.integers(0, B.shape[0], size=4 * pool)
            V = np.array([np.kron(A[i], B[j]) for i, j in zip(ia, ib)])
        else:
            V = np.array([np.kron(a, b) for a in A for b in B])
        labels = [f"{la}{lb}" for la in ("1",) + partA.labels for lb in ("1",) + partB.labels][1:]
        super().__init__(V, labels)
        self.partA, self.partB = partA, partB
        self.exact_effect_range = (
            isinstance(partA, VertexSpace) and isinstance(partB, VertexSpace)
            and not isinstance(partA, ProductHullSpace) and not isinstance(partB, ProductHullSpace)
        )

    def sample_pure(self, rng: np.random.Generator, n: int) -> np.ndarray:
        a = self.partA.sample_pure(rng, n)
        b = self.partB.sample_pure(rng, n)
        return np.array([np.kron(x, y) for x, y in zip(a, b)])


class BallSpace(StateSpace):
    """Unit ball of Bloch vectors in ``d2`` dimensions.

    Standard coordinates are ``p = (1 + v) / 2`` for Bloch vector ``v``.
    """

    rep = "ball"

    def __init__(self, d2: int, labels: Sequence[str] | None = None):
        if d2 < 1:
            raise DomainError(f"ball dimension must be positive, got {d2}")
        super().__init__(d2, labels)

    @property
    def mu(self) -> np.ndarray:
        m = np.full(self.size, 0.5)
        m[0] = 1.0
        return m

    def to_bloch(self, psi) -> np.ndarray:
        v = as_coords(psi)
        self.check_length(v)
        return 2.0 * v[1:] - 1.0

    def from_bloch(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float).ravel()
        if b.size != self.dim:
            raise DimensionError(f"expected Bloch length {self.dim}, got {b.size}")
        return np.concatenate([[1.0], (1.0 + b) / 2.0])

    def contains(self, psi, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.linalg.norm(self.to_bloch(psi)) <= 1.0 + tol)

    def effect_bloch(self, e) -> tuple[float, np.ndarray]:
        """Write the effect as ``a + b @ v`` on Bloch vectors ``v``."""
        d = _as_dual(e)
        self.check_length(d)
        a = d[0] + 0.5 * d[1:].sum()
        return float(a), 0.5 * d[1:]

    def effect_from_bloch(self, a: float, b) -> Effect:
        b = np.asarray(b, dtype=float).ravel()
        return Effect(np.concatenate([[a - b.sum()], 2.0 * b]))

    def effect_range(self, e) -> tuple[float, float]:
        a, b = self.effect_bloch(e)
        r = float(np.linalg.norm(b))
        return a - r, a + r

    def sample_pure(self, rng: np.random.Generator, n: int) -> np.ndarray:
        g = rng.standard_normal((n, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return np.hstack([np.ones((n, 1)), (1.0 + g) / 2.0])

    def represent(self, g) -> np.ndarray:
        """Lift an orthogonal ``d2 x d2`` matrix to standard coordinates."""
        R = np.asarray(g, dtype=float)
        if R.shape == (self.size, self.size):
            return R
        if R.shape != (self.dim, self.dim):
            raise DimensionError(f"expected a {self.dim}x{self.dim} matrix, got {R.shape}")
        M = np.zeros((self.size, self.size))
        M[0, 0] = 1.0
        M[1:, 0] = (1.0 - R.sum(axis=1)) / 2.0
        M[1:, 1:] = R
        return M


class QuantumSpace(StateSpace):
    """Density matrices of a ``c``-level system in fiducial coordinates.

    ``basis[k]`` reconstructs the operator, ``rho = sum_k psi_k basis[k]``, and
    ``frame[k]`` reads coordinates back, ``psi_k = Re tr(frame[k] rho)``.
    Effects correspond to operators ``sum_k e_k frame[k]``.
    """

    rep = "psd-cone-slice"

    def __init__(self, c: int, basis: np.ndarray, frame: np.ndarray,
                 labels: Sequence[str] | None = None):
        basis = np.asarray(basis, dtype=complex)
        frame = np.asarray(frame, dtype=complex)
        if basis.shape != (c * c, c, c) or frame.shape != basis.shape:
            raise DimensionError(f"basis/frame must have shape {(c * c, c, c)}")
        super().__init__(c * c - 1, labels)
        self.c = int(c)
        basis.setflags(write=False)
        frame.setflags(write=False)
        self.basis, self.frame = basis, frame

    @classmethod
    def standard(cls, c: int) -> "QuantumSpace":
        from .hermitian import quantum_basis, quantum_frame

        return cls(c, quantum_basis(c), quantum_frame(c))

    def to_operator(self, psi) -> np.ndarray:
        v = as_coords(psi)
        self.check_length(v)
        return np.tensordot(v, self.basis, axes=1)

    def from_operator(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.real(np.einsum("kij,ji->k", self.frame, rho))

    def effect_operator(self, e) -> np.ndarray:
        d = _as_dual(e)
        self.check_length(d)
        return np.tensordot(d, self.frame, axes=1)

    def effect_from_operator(self, M) -> Effect:
        M = np.asarray(M, dtype=complex)
        return Effect(np.real(np.einsum("kij,ji->k", self.basis, M)))

    def contains(self, psi, tol: float = DEFAULT_TOL) -> bool:
        rho = self.to_operator(psi)
        return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -tol)

    def effect_range(self, e) -> tuple[float, float]:
        M = self.effect_operator(e)
        w = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        return float(w[0]), float(w[-1])

    def state_from_ket(self, ket) -> np.ndarray:
        k = np.asarray(ket, dtype=complex).ravel()
        k = k / np.linalg.norm(k)
        return self.from_operator(np.outer(k, k.conj()))

    def sample_kets(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, self.c)) + 1j * rng.standard_normal((n, self.c))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    def sample_pure(self, rng: np.random.Generator, n: int) -> np.ndarray:
        kets = self.sample_kets(rng, n)
        out = np.real(np.einsum("ni,kij,nj->nk", kets.conj(), self.frame, kets))
        out[:, 0] = 1.0
        return out

    def represent(self, g) -> np.ndarray:
        """Standard-coordinate matrix of conjugation by a ``c x c`` unitary."""
        U = np.asarray(g, dtype=complex)
        if U.shape == (self.size, self.size) and np.isrealobj(g):
            return np.asarray(g, dtype=float)
        if U.shape != (self.c, self.c):
            raise DimensionError(f"expected a {self.c}x{self.c} unitary, got {U.shape}")
        conj = np.einsum("ab,lbc,dc->lad", U, self.basis, U.conj())
        M = np.real(np.einsum("kij,lji->kl", self.frame, conj))
        M[0] = 0.0
        M[0, 0] = 1.0
        return M

    def describe(self) -> dict[str, Any]:
        out = super().describe()
        out["c"] = self.c
        out["fiducials"] = "normalized generalized Gell-Mann"
        return out


def is_member(space: StateSpace, psi, tol: float = DEFAULT_TOL) -> bool:
    """Membership oracle dispatching on the space representation."""
    v = as_coords(psi)
    if v.size and abs(v[0] - 1.0) > LINALG_TOL:
        raise DomainError("state is not normalized")
    if not isinstance(space, StateSpace) or type(space).contains is StateSpace.contains:
        rep = getattr(space, "rep", type(space).__name__)
        raise UnsupportedRepresentation(f"no membership oracle for rep {rep!r}")
    return space.contains(v, tol)


# ------------------------------------------------------------------ instances


@dataclass(eq=False)
class TheoryInstance:
    """A named state space together with its effects and symmetry group."""

    name: str
    space: StateSpace
    effect_policy: str = "all-effects"
    group: Any = None
    composite_rule: str = "local-tomography-min"
    family: str = "custom"
    param: Any = None
    effects: tuple[Effect, ...] = field(default_factory=tuple)

    POLICIES = ("all-effects", "generated-by-local-products", "explicit-list")
    RULES = ("local-tomography-max", "local-tomography-min", "quantum", "classical")

    def __post_init__(self) -> None:
        if self.effect_policy not in self.POLICIES:
            raise DomainError(f"unknown effect policy {self.effect_policy!r}")
        if self.composite_rule not in self.RULES:
            raise DomainError(f"unknown composite rule {self.composite_rule!r}")
        self.effects = tuple(e if isinstance(e, Effect) else Effect(e) for e in self.effects)
        if self.effect_policy == "explicit-list":
            for i, e in enumerate(self.effects):
                if e.dim != self.space.dim:
                    raise DimensionError(f"effect {i} has dimension {e.dim}")
                lo, hi = self.space.effect_range(e)
                if lo < -DEFAULT_TOL or hi > 1 + DEFAULT_TOL:
                    raise DomainError(f"effect {i} ranges over [{lo:.6g}, {hi:.6g}]")

    @property
    def dim(self) -> int:
        return self.space.dim

    def __repr__(self) -> str:
        return f"TheoryInstance({self.name!r}, rep={self.space.rep}, dim={self.dim})"


@dataclass(frozen=True)
class CapacityCertificate:
    """``value`` states with a measurement that tells them apart perfectly."""

    states: tuple[StateVector, ...]
    measurement: Measurement | None
    value: int
    residual: float = 0.0
    upper_bound_certified: bool = False
    pool_size: int = 0

    def __post_init__(self) -> None:
        if self.measurement is not None and len(self.states) != self.value:
            raise DomainError("certificate size does not match the number of states")

    def delta_residual(self) -> float:
        if self.measurement is None or not self.states:
            return 0.0
        table = np.array([[evaluate_effect(e, s) for s in self.states]
                          for e in self.measurement.effects])
        k = len(self.states)
        return float(np.max(np.abs(table[:k, :k] - np.eye(k))))


def sample_effects(space: StateSpace, rng: np.random.Generator, n: int) -> list[Effect]:
    """Random valid effects: random functionals rescaled into ``[0, 1]``."""
    out = []
    while len(out) < n:
        d = rng.standard_normal(space.size)
        lo, hi = space.effect_range(d)
        if hi - lo < 1e-9:
            # a single-point space: effects are constants in [0, 1]
            out.append(Effect(d - lo * space.unit().dual + rng.uniform() * space.unit().dual))
            continue
        scaled = (d - lo * space.unit().dual) / (hi - lo)
        out.append(Effect(scaled))
    return out


def states_from_rows(rows: Iterable) -> list[StateVector]:
    return [StateVector(r) for r in rows]
