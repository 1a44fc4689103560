"""Bipartite composites on the tensor-product coordinate space.

Joint states of systems with ``dA`` and ``dB`` fiducial outcomes have
``(dA + 1) (dB + 1)`` coordinates in Kronecker order, so entry
``i * (dB + 1) + j`` is the probability of fiducial outcome ``i`` on A jointly
with ``j`` on B (index 0 is the unit effect).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    LINALG_TOL,
    BallSpace,
    DimensionError,
    DomainError,
    Effect,
    LinearMap,
    ProductHullSpace,
    QuantumSpace,
    StateSpace,
    StateVector,
    TheoryInstance,
    VertexSpace,
    as_coords,
)
from .groups import GroupSpec

__all__ = [
    "CompositeSpace",
    "NoSignalingResult",
    "compose",
    "product_state",
    "product_effect",
    "product_transformation",
    "joint_probability",
    "correlation_table",
    "check_no_signaling",
    "reduce",
    "local_tomography_dim_check",
    "vertex_permutation_matrix",
]


def local_tomography_dim_check(dA: int, dB: int, dAB: int) -> bool:
    """``(dAB + 1) == (dA + 1) (dB + 1)``."""
    return (dAB + 1) == (dA + 1) * (dB + 1)


@dataclass(eq=False)
class CompositeSpace:
    partA: StateSpace
    partB: StateSpace
    joint: StateSpace
    rule: str

    def __post_init__(self) -> None:
        if not local_tomography_dim_check(self.partA.dim, self.partB.dim, self.joint.dim):
            raise DimensionError(
                f"joint dimension {self.joint.dim} does not match parts {self.partA.dim}, {self.partB.dim}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return self.partA.size, self.partB.size


def vertex_permutation_matrix(V: np.ndarray, perm) -> np.ndarray:
    """Linear map sending vertex ``i`` to vertex ``perm[i]`` (V square, invertible)."""
    V = np.asarray(V, dtype=float)
    return V[list(perm)].T @ np.linalg.inv(V.T)


def _is_simplex(space: StateSpace) -> bool:
    return (isinstance(space, VertexSpace) and not isinstance(space, ProductHullSpace)
            and space.n_vertices == space.size
            and np.linalg.matrix_rank(space.vertices) == space.size)


def _as_quantum(space: StateSpace) -> QuantumSpace | None:
    if isinstance(space, QuantumSpace):
        return space
    if isinstance(space, BallSpace) and space.dim == 3:
        # ball coordinates coincide with the qubit fiducial coordinates
        return QuantumSpace.standard(2)
    return None


def _as_simplex(space: StateSpace) -> VertexSpace | None:
    if _is_simplex(space):
        return space
    if isinstance(space, BallSpace) and space.dim == 1:
        return VertexSpace([[1.0, 1.0], [1.0, 0.0]], space.labels)
    return None


def compose(instA: TheoryInstance, instB: TheoryInstance, rule: str | None = None,
            pool: int = 64, seed: int = 0) -> tuple[CompositeSpace, TheoryInstance]:
    """Joint system of two instances.

    ``rule=None`` picks the instance-specific joint set: the simplex of
    products for classical parts, the density operators of the product
    dimension for quantum parts, and the full no-signaling polytope for
    boxworld. Everything else, or ``rule="local-tomography-min"``, gets the
    convex hull of product states.
    """
    from .hermitian import tensor_basis, tensor_frame
    from .instances import boxworld_pair

    A, B = instA.space, instB.space
    labels = [f"{la}{lb}" for la in ("1",) + A.labels for lb in ("1",) + B.labels][1:]
    name = f"{instA.name}*{instB.name}"
    if rule is None:
        rule = instA.composite_rule if instA.composite_rule == instB.composite_rule else "local-tomography-min"

    qa, qb = _as_quantum(A), _as_quantum(B)
    sa, sb = _as_simplex(A), _as_simplex(B)
    if rule == "quantum" and qa is not None and qb is not None:
        joint = QuantumSpace(qa.c * qb.c, tensor_basis(qa.basis, qb.basis),
                             tensor_frame(qa.frame, qb.frame), labels)
        group = GroupSpec.named_group("SU-conj", qa.c * qb.c)
        inst = TheoryInstance(name, joint, "all-effects", group, "quantum",
                              family="quantum", param=qa.c * qb.c)
    elif rule == "classical" and sa is not None and sb is not None:
        V = np.array([np.kron(a, b) for a in sa.vertices for b in sb.vertices])
        joint = VertexSpace(V, labels)
        n = V.shape[0]
        gens = []
        for i in range(n - 1):
            perm = list(range(n))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(vertex_permutation_matrix(V, perm))
        group = GroupSpec.generated_by(gens) if gens else GroupSpec.trivial(joint.size)
        inst = TheoryInstance(name, joint, "all-effects", group, "classical",
                              family="classical", param=n)
    elif (rule == "local-tomography-max" and instA.family == "boxworld"
          and instB.family == "boxworld" and instA.param == 1 and instB.param == 1):
        inst = boxworld_pair()
        inst.name = name
        joint = inst.space
    else:
        rule = "local-tomography-min"
        joint = ProductHullSpace(A, B, pool=pool, seed=seed)
        group = None
        if instA.group is not None and instB.group is not None:
            group = GroupSpec.product_of(instA.group, A, instB.group, B)
        inst = TheoryInstance(name, joint, "generated-by-local-products", group,
                              "local-tomography-min", family="product-hull")
    return CompositeSpace(A, B, joint, rule), inst


def product_state(a, b, composite: CompositeSpace | None = None) -> StateVector:
    va, vb = as_coords(a), as_coords(b)
    if composite is not None and (va.size, vb.size) != composite.shape:
        raise DimensionError(f"parts have lengths {(va.size, vb.size)}, composite expects {composite.shape}")
    return StateVector(np.kron(va, vb))


def product_effect(ea, eb) -> Effect:
    da = ea.dual if isinstance(ea, Effect) else np.asarray(ea, dtype=float)
    db = eb.dual if isinstance(eb, Effect) else np.asarray(eb, dtype=float)
    return Effect(np.kron(da, db))


def product_transformation(TA, TB) -> LinearMap:
    ma = TA.matrix if isinstance(TA, LinearMap) else np.asarray(TA, dtype=float)
    mb = TB.matrix if isinstance(TB, LinearMap) else np.asarray(TB, dtype=float)
    return LinearMap(np.kron(ma, mb))


def joint_probability(ex, ey, psiAB) -> float:
    """Probability of outcome ``ex`` on A together with ``ey`` on B."""
    e = product_effect(ex, ey)
    v = as_coords(psiAB)
    if e.dual.size != v.size:
        raise DimensionError(f"product effect has length {e.dual.size}, state has length {v.size}")
    return float(e.dual @ v)


def _shape_for(v: np.ndarray, composite, dims) -> tuple[int, int]:
    if composite is not None:
        nA, nB = composite.shape
    elif dims is not None:
        nA, nB = dims[0] + 1, dims[1] + 1
    else:
        n = int(round(np.sqrt(v.size)))
        if n * n != v.size:
            raise DimensionError("cannot infer part sizes; pass the composite or dims")
        nA = nB = n
    if nA * nB != v.size:
        raise DimensionError(f"joint length {v.size} does not factor as {nA} x {nB}")
    return nA, nB


def correlation_table(psiAB, composite: CompositeSpace | None = None, dims=None) -> np.ndarray:
    """``T[i, j, a, b]``: probability of outcome ``a`` (0 = the fiducial
    outcome, 1 = its complement) of fiducial ``i`` with ``b`` of fiducial ``j``."""
    v = as_coords(psiAB)
    nA, nB = _shape_for(v, composite, dims)
    t = v.reshape(nA, nB)
    pa, pb, pab = t[1:, 0][:, None], t[0, 1:][None, :], t[1:, 1:]
    T = np.empty((nA - 1, nB - 1, 2, 2))
    T[:, :, 0, 0] = pab
    T[:, :, 0, 1] = pa - pab
    T[:, :, 1, 0] = pb - pab
    T[:, :, 1, 1] = 1.0 - pa - pb + pab
    return T


@dataclass(frozen=True)
class NoSignalingResult:
    ok: bool
    max_violation: float
    worst: tuple[int, int] | None

    def __bool__(self) -> bool:
        return self.ok


def check_no_signaling(psiAB, spaces: CompositeSpace | None = None,
                       tol: float = 1e-9) -> NoSignalingResult:
    """Check that each party's marginals do not depend on the other's choice.

    ``psiAB`` is either a joint state vector or a table ``T[i, j, a, b]`` of
    joint outcome probabilities. A state vector stores single-party marginals
    once, so it is no-signaling by construction; a table can violate it, and
    the worst offending fiducial pair ``(i, j)`` is reported.
    """
    arr = np.asarray(psiAB.coords if isinstance(psiAB, StateVector) else psiAB, dtype=float)
    T = arr if arr.ndim == 4 else correlation_table(arr, spaces)
    mA = T.sum(axis=3)  # [i, j, a]
    mB = T.sum(axis=2)  # [i, j, b]
    worst, where = 0.0, None
    nA, nB = T.shape[0], T.shape[1]
    for i in range(nA):
        for j in range(nB):
            # A's marginal for fiducial i must agree across B's choices
            for jj in range(nB):
                g = float(np.max(np.abs(mA[i, j] - mA[i, jj])))
                if g > worst:
                    worst, where = g, (i, j)
            for ii in range(nA):
                g = float(np.max(np.abs(mB[i, j] - mB[ii, j])))
                if g > worst:
                    worst, where = g, (i, j)
    return NoSignalingResult(worst <= tol, worst, where if worst > tol else None)


def reduce(psiAB, which: str, composite: CompositeSpace | None = None, dims=None) -> StateVector:
    """Reduced state on ``which`` in ``{"A", "B"}``.

    Computed by reading off the marginal entries and, independently, by
    applying the unit effect on the other side; the two must agree.
    """
    v = as_coords(psiAB)
    nA, nB = _shape_for(v, composite, dims)
    t = v.reshape(nA, nB)
    uA = np.zeros(nA)
    uA[0] = 1.0
    uB = np.zeros(nB)
    uB[0] = 1.0
    if which == "A":
        picked = t[:, 0]
        contracted = np.kron(np.eye(nA), uB) @ v
    elif which == "B":
        picked = t[0, :]
        contracted = np.kron(uA, np.eye(nB)) @ v
    else:
        raise DomainError(f"which must be 'A' or 'B', got {which!r}")
    if np.max(np.abs(picked - contracted)) > LINALG_TOL:
        raise DomainError("component extraction and unit-effect contraction disagree")
    return StateVector(picked)
