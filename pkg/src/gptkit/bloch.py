"""Bloch coordinates for one and two gbits.

A gbit state ``(1, p_1, ..., p_d)`` has Bloch vector ``2 (p - mu)`` with
``mu = (1, 1/2, ..., 1/2)``. Two gbits are described by the triple
``[alpha, beta, C]`` of local Bloch vectors and the correlation matrix.
Joint states use the Kronecker layout: entry ``i * (d + 1) + j`` holds the
probability of outcome ``x_i`` on A together with ``y_j`` on B, where index 0
stands for the unit effect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    LINALG_TOL,
    DimensionError,
    DomainError,
    LinearMap,
    StateVector,
    as_coords,
)

__all__ = [
    "BlochVector",
    "TwoGbitBloch",
    "to_bloch",
    "from_bloch",
    "two_gbit_bloch",
    "correlation_from_outcomes",
    "from_two_gbit_bloch",
    "product_bloch",
    "pure_norm_check",
    "equator_state",
    "equator_pm",
    "rotation_seed",
    "reflection_seed",
    "partial_transpose_equivalence",
    "local_action",
    "product_effect_probability",
]


@dataclass(frozen=True, eq=False)
class BlochVector:
    v: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.v, dtype=float).ravel()
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.v))

    def is_member(self, tol: float = DEFAULT_TOL) -> bool:
        return self.norm <= 1.0 + tol

    def is_pure(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class TwoGbitBloch:
    """Local Bloch vectors ``alpha``, ``beta`` and correlation matrix ``C``."""

    alpha: np.ndarray
    beta: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.alpha, dtype=float).ravel()
        b = np.array(self.beta, dtype=float).ravel()
        C = np.array(self.C, dtype=float)
        if C.shape != (a.size, b.size):
            raise DimensionError(f"C has shape {C.shape}, expected {(a.size, b.size)}")
        for arr in (a, b, C):
            arr.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "C", C)

    @property
    def norm_sq(self) -> float:
        return float(self.alpha @ self.alpha + self.beta @ self.beta + np.sum(self.C * self.C))

    def vector(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.beta, self.C.ravel()])

    def within_bounds(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.vector()), initial=0.0) <= 1.0 + tol)

    def to_state(self) -> StateVector:
        return from_two_gbit_bloch(self)

    def allclose(self, other: "TwoGbitBloch", tol: float = LINALG_TOL) -> bool:
        return bool(np.max(np.abs(self.vector() - other.vector())) <= tol)


def _gbit_mu(d: int) -> np.ndarray:
    mu = np.full(d + 1, 0.5)
    mu[0] = 1.0
    return mu


def to_bloch(psi, mu=None) -> BlochVector:
    """``2 (p - mu)`` on the fiducial entries."""
    v = as_coords(psi)
    m = _gbit_mu(v.size - 1) if mu is None else as_coords(mu)
    if m.size != v.size:
        raise DimensionError(f"state has length {v.size}, reference has length {m.size}")
    return BlochVector(2.0 * (v[1:] - m[1:]))


def from_bloch(b, mu=None) -> StateVector:
    vec = b.v if isinstance(b, BlochVector) else np.asarray(b, dtype=float).ravel()
    m = _gbit_mu(vec.size) if mu is None else as_coords(mu)
    if m.size != vec.size + 1:
        raise DimensionError(f"Bloch vector has length {vec.size}, reference has length {m.size}")
    return StateVector(np.concatenate([[1.0], m[1:] + vec / 2.0]))


def _joint_table(psiAB) -> np.ndarray:
    v = as_coords(psiAB)
    n = int(round(np.sqrt(v.size)))
    if n * n != v.size or n < 2:
        raise DimensionError(f"length {v.size} is not a square joint layout")
    return v.reshape(n, n)


def two_gbit_bloch(psiAB) -> TwoGbitBloch:
    """``alpha_i = 2 p(x_i) - 1``, ``beta_j = 2 p(y_j) - 1`` and
    ``C_ij = 4 p(x_i y_j) - 2 p(x_i) - 2 p(y_j) + 1``."""
    t = _joint_table(psiAB)
    pa, pb, pab = t[1:, 0], t[0, 1:], t[1:, 1:]
    C = 4.0 * pab - 2.0 * pa[:, None] - 2.0 * pb[None, :] + 1.0
    return TwoGbitBloch(2.0 * pa - 1.0, 2.0 * pb - 1.0, C)


def correlation_from_outcomes(psiAB) -> np.ndarray:
    """Correlation matrix as ``p(xy) - p(x y') - p(x' y) + p(x' y')``,
    where primes denote the complementary outcomes."""
    t = _joint_table(psiAB)
    pa, pb, pxy = t[1:, 0][:, None], t[0, 1:][None, :], t[1:, 1:]
    p_x_ny = pa - pxy
    p_nx_y = pb - pxy
    p_nx_ny = 1.0 - pa - pb + pxy
    return pxy - p_x_ny - p_nx_y + p_nx_ny


def from_two_gbit_bloch(b: TwoGbitBloch) -> StateVector:
    da, db = b.alpha.size, b.beta.size
    t = np.empty((da + 1, db + 1))
    t[0, 0] = 1.0
    t[1:, 0] = (1.0 + b.alpha) / 2.0
    t[0, 1:] = (1.0 + b.beta) / 2.0
    t[1:, 1:] = (1.0 + b.alpha[:, None] + b.beta[None, :] + b.C) / 4.0
    return StateVector(t.ravel())


def product_bloch(a, b) -> TwoGbitBloch:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    return TwoGbitBloch(a, b, np.outer(a, b))


def product_effect_probability(phiA, phiB, b: TwoGbitBloch) -> float:
    """Outcome probability of the product of the two tight effects pointing
    along unit vectors ``phiA`` and ``phiB``."""
    phiA = np.asarray(phiA, dtype=float)
    phiB = np.asarray(phiB, dtype=float)
    return float((1.0 + phiA @ b.alpha + phiB @ b.beta + phiA @ b.C @ phiB) / 4.0)


def pure_norm_check(b: TwoGbitBloch, tol: float = DEFAULT_TOL) -> bool:
    return abs(b.norm_sq - 3.0) <= tol


def equator_state(u: float, v: float) -> TwoGbitBloch:
    """Pure states on the surface of the ball spanned by the first-axis poles
    and the symmetric equator, in polar angles ``(u, v)``."""
    cu, su = np.cos(u), np.sin(u)
    cv, sv = np.cos(v), np.sin(v)
    a = np.array([cu, 0.0, 0.0])
    C = np.array([
        [1.0, 0.0, 0.0],
        [0.0, su * cv, su * sv],
        [0.0, su * sv, -su * cv],
    ])
    return TwoGbitBloch(a, a.copy(), C)


def rotation_seed(v: float) -> np.ndarray:
    return np.array([[np.cos(v), np.sin(v)], [-np.sin(v), np.cos(v)]])


def reflection_seed(v: float) -> np.ndarray:
    return np.array([[np.cos(v), np.sin(v)], [np.sin(v), -np.cos(v)]])


def equator_pm(v: float, sign: int) -> TwoGbitBloch:
    """Equator state whose lower correlation block is the rotation
    (``sign = +1``) or reflection (``sign = -1``) seed."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    C = np.zeros((3, 3))
    C[0, 0] = 1.0
    C[1:, 1:] = rotation_seed(v) if sign == 1 else reflection_seed(v)
    return TwoGbitBloch(np.zeros(3), np.zeros(3), C)


def partial_transpose_equivalence(b: TwoGbitBloch) -> TwoGbitBloch:
    """Reflect subsystem A through the plane orthogonal to its third axis."""
    if b.alpha.size < 3:
        raise DimensionError("partial transposition needs three Bloch components on A")
    tau = np.ones(b.alpha.size)
    tau[2] = -1.0
    return TwoGbitBloch(tau * b.alpha, b.beta, tau[:, None] * b.C)


def _orthogonal(G, n: int, tol: float) -> np.ndarray:
    M = G.matrix if isinstance(G, LinearMap) else np.asarray(G, dtype=float)
    if M.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix, got {M.shape}")
    if np.max(np.abs(M.T @ M - np.eye(n))) > tol:
        raise DomainError("local action requires an orthogonal matrix")
    return M


def local_action(GA, GB, b: TwoGbitBloch, tol: float = 1e-10) -> TwoGbitBloch:
    """``[GA alpha, GB beta, GA C GB^T]`` for orthogonal ``GA`` and ``GB``."""
    A = _orthogonal(GA, b.alpha.size, tol)
    B = _orthogonal(GB, b.beta.size, tol)
    return TwoGbitBloch(A @ b.alpha, B @ b.beta, A @ b.C @ B.T)
