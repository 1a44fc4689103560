"""Built-in theories: classical simplices, quantum systems, balls and boxworld."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .core import (
    BallSpace,
    DomainError,
    LinearMap,
    QuantumSpace,
    TheoryInstance,
    VertexSpace,
)
from .groups import GroupSpec

__all__ = [
    "InstanceCatalog",
    "classical",
    "quantum",
    "ball_gbit",
    "boxworld_gbit",
    "boxworld_pair",
    "pr_box",
    "deterministic_box",
    "box_to_vector",
    "vector_to_box",
    "chsh_value",
    "chsh_functional",
    "relabeling_matrices",
    "classical_transposition",
    "diagonal_embedding",
    "catalog",
    "from_name",
]


# ----------------------------------------------------------------- classical


def _std_to_full(c: int) -> np.ndarray:
    """Standard coordinates ``(1, p_1..p_{c-1})`` to the full distribution."""
    E = np.zeros((c, c))
    E[: c - 1, 1:] = np.eye(c - 1)
    E[c - 1, 0] = 1.0
    E[c - 1, 1:] = -1.0
    return E


def _full_to_std(c: int) -> np.ndarray:
    F = np.zeros((c, c))
    F[0] = 1.0
    F[1:, : c - 1] = np.eye(c - 1)
    return F


def classical_transposition(c: int, i: int, j: int) -> np.ndarray:
    """Standard-coordinate matrix swapping outcomes ``i`` and ``j``."""
    P = np.eye(c)
    P[[i, j]] = P[[j, i]]
    return _full_to_std(c) @ P @ _std_to_full(c)


def classical(c: int) -> TheoryInstance:
    """Probability distributions over ``c`` outcomes."""
    if int(c) != c or c < 1:
        raise DomainError(f"classical capacity must be a positive integer, got {c}")
    c = int(c)
    V = np.zeros((c, c))
    V[:, 0] = 1.0
    V[: c - 1, 1:] = np.eye(c - 1)
    space = VertexSpace(V, [f"p{i}" for i in range(1, c)])
    if c == 1:
        group = GroupSpec.trivial(1)
    else:
        group = GroupSpec.generated_by([classical_transposition(c, i, i + 1) for i in range(c - 1)])
    return TheoryInstance(f"classical:{c}", space, "all-effects", group, "classical",
                          family="classical", param=c)


def diagonal_embedding(c: int) -> LinearMap:
    """Map classical(c) coordinates onto quantum(c) coordinates of diag(p)."""
    qs = QuantumSpace.standard(c)
    E = _std_to_full(c)
    cols = []
    for k in range(c):
        e = np.zeros(c)
        e[k] = 1.0
        p = E @ e
        cols.append(np.real(np.einsum("kij,ji->k", qs.frame, np.diag(p).astype(complex))))
    return LinearMap(np.array(cols).T)


# ------------------------------------------------------------------- quantum


def quantum(c: int) -> TheoryInstance:
    """Density matrices of a ``c``-level system, ``2 <= c <= 4``."""
    if int(c) != c or not 2 <= c <= 4:
        raise DomainError(f"quantum capacity must be 2, 3 or 4, got {c}")
    c = int(c)
    space = QuantumSpace.standard(c)
    group = GroupSpec.named_group("SU-conj", c)
    return TheoryInstance(f"quantum:{c}", space, "all-effects", group, "quantum",
                          family="quantum", param=c)


# ---------------------------------------------------------------------- ball


def ball_gbit(d2: int, full_orthogonal: bool | None = None) -> TheoryInstance:
    """Unit ball of dimension ``d2`` with its rotation group.

    ``full_orthogonal`` selects O(d2) instead of SO(d2). It defaults to True
    only for ``d2 = 1``, where SO(1) is trivial and cannot exchange the two
    endpoints of the segment.
    """
    if int(d2) != d2 or d2 < 1:
        raise DomainError(f"ball dimension must be a positive integer, got {d2}")
    d2 = int(d2)
    if full_orthogonal is None:
        full_orthogonal = d2 == 1
    space = BallSpace(d2)
    group = GroupSpec.named_group("O" if full_orthogonal else "SO", d2)
    rule = "quantum" if d2 == 3 else ("classical" if d2 == 1 else "local-tomography-min")
    return TheoryInstance(f"ball:{d2}", space, "all-effects", group, rule,
                          family="ball", param=d2)


# ------------------------------------------------------------------ boxworld


def deterministic_box(a0: int, a1: int, b0: int, b1: int) -> np.ndarray:
    """``P[a, b, x, y]`` for local outputs ``a = a_x`` and ``b = b_y``."""
    P = np.zeros((2, 2, 2, 2))
    a, b = (a0, a1), (b0, b1)
    for x, y in itertools.product((0, 1), repeat=2):
        P[a[x], b[y], x, y] = 1.0
    return P


def pr_box(alpha: int = 0, beta: int = 0, gamma: int = 0) -> np.ndarray:
    """Box with ``a xor b = xy xor alpha x xor beta y xor gamma``, uniform marginals."""
    P = np.zeros((2, 2, 2, 2))
    for a, b, x, y in itertools.product((0, 1), repeat=4):
        if (a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma):
            P[a, b, x, y] = 0.5
    return P


def box_to_vector(P: np.ndarray) -> np.ndarray:
    """Standard coordinates: entry ``(0,0)`` is 1, ``(i,0)`` is ``P_A(0|x=i-1)``,
    ``(0,j)`` is ``P_B(0|y=j-1)`` and ``(i,j)`` is ``P(00|x=i-1,y=j-1)``."""
    t = np.zeros((3, 3))
    t[0, 0] = P[:, :, 0, 0].sum()
    for x in (0, 1):
        t[x + 1, 0] = P[0, :, x, 0].sum()
    for y in (0, 1):
        t[0, y + 1] = P[:, 0, 0, y].sum()
    for x, y in itertools.product((0, 1), repeat=2):
        t[x + 1, y + 1] = P[0, 0, x, y]
    return t.ravel()


def vector_to_box(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`box_to_vector` on no-signaling boxes (linear in ``v``)."""
    t = np.asarray(v, dtype=float).reshape(3, 3)
    P = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product((0, 1), repeat=2):
        pa, pb, p00 = t[x + 1, 0], t[0, y + 1], t[x + 1, y + 1]
        P[0, 0, x, y] = p00
        P[0, 1, x, y] = pa - p00
        P[1, 0, x, y] = pb - p00
        P[1, 1, x, y] = t[0, 0] - pa - pb + p00
    return P


def _relabel(P: np.ndarray, op: str) -> np.ndarray:
    Q = np.zeros_like(P)
    for a, b, x, y in itertools.product((0, 1), repeat=4):
        if op == "swap-x":
            Q[a, b, 1 - x, y] = P[a, b, x, y]
        elif op == "swap-y":
            Q[a, b, x, 1 - y] = P[a, b, x, y]
        elif op == "flip-a0":
            Q[a ^ (x == 0), b, x, y] = P[a, b, x, y]
        elif op == "flip-a1":
            Q[a ^ (x == 1), b, x, y] = P[a, b, x, y]
        elif op == "flip-b0":
            Q[a, b ^ (y == 0), x, y] = P[a, b, x, y]
        elif op == "flip-b1":
            Q[a, b ^ (y == 1), x, y] = P[a, b, x, y]
        elif op == "parties":
            Q[b, a, y, x] = P[a, b, x, y]
        else:
            raise DomainError(f"unknown relabeling {op!r}")
    return Q


PAIR_RELABELINGS = ("swap-x", "flip-a0", "flip-a1", "swap-y", "flip-b0", "flip-b1", "parties")


def relabeling_matrices(ops=PAIR_RELABELINGS) -> list[np.ndarray]:
    """Standard-coordinate matrices of box relabelings, built column by column."""
    mats = []
    for op in ops:
        cols = [box_to_vector(_relabel(vector_to_box(e), op)) for e in np.eye(9)]
        mats.append(np.array(cols).T)
    return mats


def _square_generators() -> list[np.ndarray]:
    swap = np.eye(3)[[0, 2, 1]]
    flips = []
    for k in (1, 2):
        M = np.eye(3)
        M[k, k] = -1.0
        M[k, 0] = 1.0
        flips.append(M)
    return [swap] + flips


def boxworld_gbit() -> TheoryInstance:
    """One party of the two-input, two-output scenario: the unit square."""
    V = np.array([[1.0, a0, a1] for a0, a1 in itertools.product((1.0, 0.0), repeat=2)])
    space = VertexSpace(V, ["P(0|x=0)", "P(0|x=1)"])
    group = GroupSpec.generated_by(_square_generators())
    return TheoryInstance("boxworld", space, "generated-by-local-products", group,
                          "local-tomography-max", family="boxworld", param=1)


def _pair_vertices() -> tuple[np.ndarray, list[str]]:
    verts, labels = [], []
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        verts.append(box_to_vector(deterministic_box(a0, a1, b0, b1)))
        labels.append(f"det(a={a0}{a1},b={b0}{b1})")
    for al, be, ga in itertools.product((0, 1), repeat=3):
        verts.append(box_to_vector(pr_box(al, be, ga)))
        labels.append(f"pr({al}{be}{ga})")
    return np.array(verts), labels


def boxworld_pair() -> TheoryInstance:
    """All no-signaling boxes of the two-party, two-input, two-output scenario.

    Vertices are listed deterministic boxes first (16), then PR boxes (8).
    """
    V, vlabels = _pair_vertices()
    labels = [f"{i}{j}" for i in range(3) for j in range(3)][1:]
    space = VertexSpace(V, labels)
    space.vertex_labels = tuple(vlabels)
    group = GroupSpec.generated_by(relabeling_matrices())
    return TheoryInstance("boxworld-pair", space, "generated-by-local-products", group,
                          "local-tomography-max", family="boxworld", param=2)


def chsh_functional() -> np.ndarray:
    """Dual vector with ``value @ v = sum_{xy} (-1)^{xy} E_xy`` on pair vectors."""
    w = np.zeros((3, 3))
    for x, y in itertools.product((0, 1), repeat=2):
        s = -1.0 if x and y else 1.0
        # E = 4 p00 - 2 pA - 2 pB + 1
        w[x + 1, y + 1] += 4 * s
        w[x + 1, 0] += -2 * s
        w[0, y + 1] += -2 * s
        w[0, 0] += s
    return w.ravel()


def chsh_value(v) -> float:
    return float(chsh_functional() @ np.asarray(v, dtype=float).ravel())


# ------------------------------------------------------------------- catalog


@dataclass(frozen=True)
class InstanceCatalog:
    entries: dict[str, tuple[Callable[..., TheoryInstance], tuple[Any, ...]]] = field(default_factory=dict)

    def names(self) -> list[str]:
        return sorted(self.entries)

    def build(self, name: str) -> TheoryInstance:
        try:
            fn, args = self.entries[name]
        except KeyError:
            return from_name(name)
        return fn(*args)


def catalog() -> InstanceCatalog:
    entries: dict[str, tuple[Callable[..., TheoryInstance], tuple[Any, ...]]] = {}
    for c in range(1, 6):
        entries[f"classical:{c}"] = (classical, (c,))
    for c in (2, 3, 4):
        entries[f"quantum:{c}"] = (quantum, (c,))
    for d in (1, 3, 5, 7):
        entries[f"ball:{d}"] = (ball_gbit, (d,))
    entries["boxworld"] = (boxworld_gbit, ())
    entries["boxworld-pair"] = (boxworld_pair, ())
    return InstanceCatalog(entries)


_NAME = re.compile(r"^(classical|quantum|ball):(\d+)$")


def from_name(name: str) -> TheoryInstance:
    """Parse ``classical:<c>``, ``quantum:<c>``, ``ball:<d2>``, ``boxworld`` or
    ``boxworld-pair``."""
    name = name.strip()
    if name == "boxworld":
        return boxworld_gbit()
    if name == "boxworld-pair":
        return boxworld_pair()
    m = _NAME.match(name)
    if not m:
        raise DomainError(f"unknown theory name {name!r}")
    family, n = m.group(1), int(m.group(2))
    return {"classical": classical, "quantum": quantum, "ball": ball_gbit}[family](n)
