"""Hermitian-operator picture of gbit states and the SU(2) to SO(3) cover.

All complex arithmetic of the package lives here. A single gbit state with
coordinates ``psi`` maps to ``psi0 (I - s1 - s2 - s3) / 2 + sum_i psi_i s_i``,
which is ``(I + v . sigma) / 2`` in terms of its Bloch vector ``v``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .core import (
    LINALG_TOL,
    DimensionError,
    DomainError,
    LinearMap,
    as_coords,
)

__all__ = [
    "pauli",
    "gell_mann",
    "quantum_frame",
    "quantum_basis",
    "tensor_basis",
    "tensor_frame",
    "l_map",
    "l_map_tensor",
    "isometry_check",
    "su2_to_so3",
    "so3_to_su2",
    "covariance_check",
    "is_special_unitary",
    "aligning_unitary",
    "top_ket",
    "rz",
]


def pauli() -> np.ndarray:
    """``(sigma1, sigma2, sigma3)`` stacked along axis 0."""
    return np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )


@lru_cache(maxsize=None)
def _gell_mann(c: int) -> np.ndarray:
    mats = []
    for j in range(c):
        for k in range(j + 1, c):
            m = np.zeros((c, c), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
    for j in range(c):
        for k in range(j + 1, c):
            m = np.zeros((c, c), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, c):
        diag = np.zeros(c)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    out = np.array(mats).reshape(c * c - 1, c, c)
    out.setflags(write=False)
    return out


def gell_mann(c: int) -> np.ndarray:
    """Generalized Gell-Mann matrices with ``tr(l_j l_k) = 2 delta_jk``.

    Ordered symmetric, antisymmetric, then diagonal, so ``c = 2`` yields the
    Pauli matrices in their usual order.
    """
    if c < 2:
        raise DomainError(f"Gell-Mann matrices need c >= 2, got {c}")
    return _gell_mann(int(c))


def _norms(c: int) -> np.ndarray:
    return np.array([np.abs(np.linalg.eigvalsh(m)).max() for m in gell_mann(c)])


def quantum_frame(c: int) -> np.ndarray:
    """Fiducial effect operators ``I`` and ``(I + l_k / |l_k|) / 2``."""
    lam, n = gell_mann(c), _norms(c)
    eye = np.eye(c, dtype=complex)
    return np.concatenate([eye[None], 0.5 * (eye + lam / n[:, None, None])])


def quantum_basis(c: int) -> np.ndarray:
    """Operators ``B_k`` dual to :func:`quantum_frame`: ``tr(F_a B_b) = delta``."""
    lam, n = gell_mann(c), _norms(c)
    b0 = np.eye(c, dtype=complex) / c - 0.5 * np.tensordot(n, lam, axes=1)
    return np.concatenate([b0[None], lam * n[:, None, None]])


def _kron_all(stacks) -> np.ndarray:
    out = []
    for combo in product(*stacks):
        m = combo[0]
        for f in combo[1:]:
            m = np.kron(m, f)
        out.append(m)
    return np.array(out)


def tensor_basis(*stacks) -> np.ndarray:
    """Kronecker products of reconstruction bases, first factor slowest."""
    return _kron_all(stacks)


def tensor_frame(*stacks) -> np.ndarray:
    return _kron_all(stacks)


def l_map(psi) -> np.ndarray:
    """Hermitian image of a single gbit state (three fiducial outcomes)."""
    v = as_coords(psi)
    if v.size != 4:
        raise DimensionError(f"gbit state must have length 4, got {v.size}")
    return np.tensordot(v, quantum_basis(2), axes=1)


@lru_cache(maxsize=None)
def _gbit_tensor_basis(m: int) -> np.ndarray:
    b = tensor_basis(*([quantum_basis(2)] * m))
    b.setflags(write=False)
    return b


def l_map_tensor(psi, m: int) -> np.ndarray:
    """Factor-wise Hermitian image of an ``m``-gbit joint state, ``m <= 3``."""
    if not 1 <= m <= 3:
        raise DomainError(f"tensor power must be 1, 2 or 3, got {m}")
    v = as_coords(psi)
    if v.size != 4**m:
        raise DimensionError(f"{m}-gbit state must have length {4**m}, got {v.size}")
    return np.tensordot(v, _gbit_tensor_basis(m), axes=1)


def isometry_check(psi, psi2) -> tuple[float, float]:
    """Hilbert-Schmidt overlap of two two-gbit images, and its Bloch formula."""
    from .bloch import two_gbit_bloch

    r1, r2 = l_map_tensor(psi, 2), l_map_tensor(psi2, 2)
    lhs = float(np.real(np.trace(r1 @ r2)))
    b1, b2 = two_gbit_bloch(psi), two_gbit_bloch(psi2)
    rhs = 0.25 + 0.25 * (b1.alpha @ b2.alpha + b1.beta @ b2.beta + np.sum(b1.C * b2.C))
    return lhs, float(rhs)


def is_special_unitary(U, tol: float = 1e-10) -> bool:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    eye = np.eye(U.shape[0])
    return bool(np.max(np.abs(U.conj().T @ U - eye)) <= tol and abs(np.linalg.det(U) - 1) <= tol)


def su2_to_so3(U) -> LinearMap:
    """Rotation ``G`` with ``U s_i U^dag = sum_j G[j, i] s_j``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or not is_special_unitary(U):
        raise DomainError("input is not a 2x2 special unitary")
    s = pauli()
    conj = np.einsum("ab,ibc,dc->iad", U, s, U.conj())
    G = 0.5 * np.real(np.einsum("jab,iba->ji", s, conj))
    return LinearMap(G)


def so3_to_su2(R) -> np.ndarray:
    """One of the two preimages of a rotation, via its axis and angle."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise DimensionError("expected a 3x3 rotation")
    if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-9 or np.linalg.det(R) < 0:
        raise DomainError("input is not a rotation")
    cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = float(np.arccos(cos_t))
    if theta < 1e-12:
        return np.eye(2, dtype=complex)
    if np.pi - theta < 1e-6:
        # axis from the symmetric part when sin(theta) vanishes
        B = (R + np.eye(3)) / 2.0
        k = int(np.argmax(np.diag(B)))
        axis = B[:, k] / np.sqrt(B[k, k])
    else:
        axis = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
        axis /= 2.0 * np.sin(theta)
    axis /= np.linalg.norm(axis)
    gen = np.tensordot(axis, pauli(), axes=1)
    U = np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * gen
    if np.max(np.abs(su2_to_so3(U).matrix - R)) > 1e-9:
        U = np.cos(theta / 2) * np.eye(2) + 1j * np.sin(theta / 2) * gen
    return U


def rz(theta: float) -> np.ndarray:
    """``exp(-i theta s3 / 2)``."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _ball_lift(G: np.ndarray) -> np.ndarray:
    M = np.zeros((4, 4))
    M[0, 0] = 1.0
    M[1:, 0] = (1.0 - G.sum(axis=1)) / 2.0
    M[1:, 1:] = G
    return M


def covariance_check(U, psi, tol: float = LINALG_TOL) -> bool:
    """Check that rotating then mapping equals mapping then conjugating.

    ``psi`` is a single gbit (length 4) with ``U`` a 2x2 special unitary, or a
    two-gbit state (length 16) with ``U`` a pair of local special unitaries.
    """
    v = as_coords(psi)
    if v.size == 4:
        G = _ball_lift(su2_to_so3(U).matrix)
        lhs = l_map(G @ v)
        Uf = np.asarray(U, dtype=complex)
        rhs = Uf @ l_map(v) @ Uf.conj().T
    elif v.size == 16:
        UA, UB = U
        G = np.kron(_ball_lift(su2_to_so3(UA).matrix), _ball_lift(su2_to_so3(UB).matrix))
        lhs = l_map_tensor(G @ v, 2)
        W = np.kron(np.asarray(UA, dtype=complex), np.asarray(UB, dtype=complex))
        rhs = W @ l_map_tensor(v, 2) @ W.conj().T
    else:
        raise DimensionError(f"expected a one- or two-gbit state, got length {v.size}")
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


def top_ket(rho) -> np.ndarray:
    """Eigenvector of the largest eigenvalue, i.e. the ket of a pure state."""
    rho = np.asarray(rho, dtype=complex)
    w, V = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return V[:, -1]


def aligning_unitary(a, b) -> np.ndarray:
    """Special unitary ``U`` with ``U a`` equal to ``b`` up to a phase."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise DimensionError("kets have different lengths")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    overlap = np.vdot(b, a)
    if abs(overlap) > 1e-15:
        b = b * overlap / abs(overlap)
    w = a - b
    nw = np.linalg.norm(w)
    n = a.size
    if nw < 1e-15:
        return np.eye(n, dtype=complex)
    w /= nw
    H = np.eye(n, dtype=complex) - 2.0 * np.outer(w, w.conj())
    return H * np.linalg.det(H) ** (-1.0 / n)
