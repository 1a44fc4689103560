"""Requirement audits R1 to R5 and R5', plus the fixed theorem battery.

Every check draws its randomness from ``SeedSequence([seed, k])`` with a
fixed ``k`` per check, so a subset of requirements reproduces exactly the
numbers a full run gives.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .composite import compose, local_tomography_dim_check
from .core import (
    DEFAULT_TOL,
    LINALG_TOL,
    BallSpace,
    DomainError,
    Effect,
    LinearMap,
    ProductHullSpace,
    QuantumSpace,
    StateSpace,
    TheoryInstance,
    VertexSpace,
    as_coords,
    sample_effects,
)
from .simplex import LPProblem, solve

__all__ = [
    "VERDICTS",
    "REQUIREMENTS",
    "RequirementResult",
    "TheoremCheck",
    "AuditReport",
    "FaceWitness",
    "audit_r1",
    "audit_r2",
    "audit_r3",
    "audit_r4",
    "audit_r5",
    "audit_r5prime",
    "canonical_face_witness",
    "run_audit",
    "run_theorem_suite",
    "reverify_witness",
    "chsh_classical",
    "chsh_boxworld",
    "chsh_quantum",
    "to_jsonable",
]

VERDICTS = ("PASS", "FAIL", "NOT-APPLICABLE", "AMBIGUOUS")
REQUIREMENTS = ("r1", "r2", "r3", "r4", "r5", "r5prime")
_STREAM = {name: k for k, name in enumerate(REQUIREMENTS + ("theorems",))}


def _rng(seed: int, key: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), _STREAM[key]]))


def to_jsonable(x: Any) -> Any:
    """Plain Python containers and numbers for JSON emission."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


@dataclass
class RequirementResult:
    verdict: str
    witnesses: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    notes: str = ""

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise DomainError(f"unknown verdict {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict[str, Any]:
        return to_jsonable({"verdict": self.verdict, "witnesses": self.witnesses,
                            "tolerances": self.tolerances, "seed": self.seed,
                            "notes": self.notes})


@dataclass
class TheoremCheck:
    name: str
    expected: float
    observed: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return to_jsonable({"name": self.name, "expected": self.expected,
                            "observed": self.observed, "tolerance": self.tolerance,
                            "pass": self.passed})


def _close(name: str, expected: float, observed: float, tol: float) -> TheoremCheck:
    return TheoremCheck(name, float(expected), float(observed), float(tol),
                        bool(abs(observed - expected) <= tol))


def _at_most(name: str, observed: float, bound: float) -> TheoremCheck:
    """Residual-style check: observed must not exceed ``bound``."""
    return TheoremCheck(name, 0.0, float(observed), float(bound), bool(observed <= bound))


@dataclass
class AuditReport:
    instance: str
    seed: int
    requirements: dict[str, RequirementResult] = field(default_factory=dict)
    theorems: list[TheoremCheck] = field(default_factory=list)
    runtime_ms: float = 0.0

    def verdicts(self) -> dict[str, str]:
        return {k: r.verdict for k, r in self.requirements.items()}

    def exit_code(self) -> int:
        """0 all pass, 2 any FAIL, 3 any AMBIGUOUS (FAIL wins)."""
        vs = set(self.verdicts().values())
        if "FAIL" in vs or any(not t.passed for t in self.theorems):
            return 2
        if "AMBIGUOUS" in vs:
            return 3
        return 0

    def to_dict(self, runtime: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "schema": 1,
            "tool-version": __version__,
            "seed": int(self.seed),
            "instance": self.instance,
            "requirements": {k: self.requirements[k].to_dict()
                             for k in REQUIREMENTS if k in self.requirements},
            "theorems": [t.to_dict() for t in self.theorems],
        }
        if runtime:
            out["runtime-ms"] = float(self.runtime_ms)
        return out


# ----------------------------------------------------------------------- R1


def _gbit_of(instance: TheoryInstance) -> TheoryInstance:
    from .instances import boxworld_gbit, classical, quantum

    if instance.family == "classical":
        return classical(2)
    if instance.family == "quantum":
        return quantum(2)
    if instance.family == "boxworld":
        return boxworld_gbit()
    return instance


def _gbit_candidates(space: StateSpace, rng: np.random.Generator) -> np.ndarray:
    if isinstance(space, VertexSpace) and space.n_vertices <= 64:
        return space.vertices
    pts = space.sample_pure(rng, 18)
    if isinstance(space, BallSpace):
        b = space.to_bloch(pts[0])
        pts = np.vstack([pts, space.from_bloch(-b)])
    elif isinstance(space, QuantumSpace):
        rho = space.to_operator(pts[0])
        pts = np.vstack([pts, space.from_operator(np.eye(space.c) - rho)])
    return pts


def audit_r1(instance: TheoryInstance, seed: int = 0, tol: float = DEFAULT_TOL) -> RequirementResult:
    """Finite dimension of the capacity-two member of the family."""
    from .lp import capacity

    gbit = _gbit_of(instance)
    d2 = gbit.space.dim
    wit: dict[str, Any] = {"gbit": gbit.name, "d2": d2}
    notes = ""
    if gbit is instance and instance.family == "custom":
        notes = "instance is taken as its own capacity-two system"
    rng = _rng(seed, "r1")
    if gbit.space.size <= 64:
        cert = capacity(gbit.space, max_c=3, candidate_pures=_gbit_candidates(gbit.space, rng), tol=tol)
        wit["gbit_capacity"] = cert.value
        if cert.value != 2:
            notes = (notes + "; " if notes else "") + "declared capacity-two system has capacity " + str(cert.value)
    verdict = "PASS" if isinstance(d2, int) and d2 >= 0 else "FAIL"
    return RequirementResult(verdict, wit, {"membership": tol}, seed, notes)


# ----------------------------------------------------------------------- R2


def _r2_parts(instance: TheoryInstance) -> tuple[TheoryInstance, TheoryInstance]:
    from .instances import boxworld_gbit

    if instance.family == "boxworld" and instance.param == 2:
        return boxworld_gbit(), boxworld_gbit()
    return instance, instance


def audit_r2(instA: TheoryInstance, instB: TheoryInstance | None = None,
             composite: TheoryInstance | None = None, joint_dim: int | None = None,
             seed: int = 0, tol: float = DEFAULT_TOL, n_states: int | None = None) -> RequirementResult:
    """Dimension law plus a rank test of product-effect statistics.

    ``composite`` defaults to the instance-specific joint system; ``joint_dim``
    overrides the declared joint dimension for hypothetical composites.
    """
    instB = instA if instB is None else instB
    if composite is None:
        _, composite = compose(instA, instB, seed=seed)
    dA, dB = instA.space.dim, instB.space.dim
    dAB = composite.space.dim if joint_dim is None else int(joint_dim)
    wit: dict[str, Any] = {"dA": dA, "dB": dB, "dAB": dAB,
                           "expected_dAB": (dA + 1) * (dB + 1) - 1, "joint": composite.name}
    tols = {"rank_relative": 1e-8, "min_gap": 1e3}
    if not local_tomography_dim_check(dA, dB, dAB):
        return RequirementResult("FAIL", wit, tols, seed, "dimension law violated")

    from .groups import numerical_rank

    rng = _rng(seed, "r2")
    J = composite.space
    n = J.size
    ns = max(n_states or 0, n + 16)
    S = J.sample_states(rng, ns)
    k = int(math.ceil(math.sqrt(n))) + 3
    eA = sample_effects(instA.space, rng, k)
    eB = sample_effects(instB.space, rng, k)
    E = np.array([np.kron(a.dual, b.dual) for a in eA for b in eB])
    M = E @ S.T
    rank, gap, _, ok = numerical_rank(M)
    rank_S = numerical_rank(S)[0]
    wit.update({"rank": rank, "states_rank": rank_S, "expected_rank": dAB + 1,
                "singular_value_gap": gap, "n_states": ns, "n_product_effects": len(E)})
    if not ok:
        return RequirementResult("AMBIGUOUS", wit, tols, seed, "no clear singular-value gap")
    if rank == dAB + 1 and rank_S == dAB + 1:
        return RequirementResult("PASS", wit, tols, seed)
    return RequirementResult("FAIL", wit, tols, seed,
                             "product statistics do not determine the sampled joint states")


# ----------------------------------------------------------------------- R3


@dataclass
class FaceWitness:
    """Candidate identification of the face ``omega = 0`` with a smaller space.

    ``L`` maps face coordinates to the small space and ``J`` maps back.
    ``pairs`` holds (face-preserving big transformation, small transformation).
    """

    omega: np.ndarray
    small: StateSpace
    small_name: str
    L: np.ndarray
    J: np.ndarray
    face_sampler: Callable[[np.random.Generator, int], np.ndarray]
    pairs: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)


def _classical_face(c: int) -> FaceWitness:
    from .instances import classical, classical_transposition

    small = classical(c - 1).space
    big = classical(c).space
    omega = np.concatenate([[1.0], -np.ones(c - 1)])
    L = np.eye(c)[: c - 1]
    J = np.vstack([np.eye(c - 1), np.concatenate([[1.0], -np.ones(c - 2)])])
    faceV = big.vertices[: c - 1]

    def sampler(rng, n):
        w = rng.dirichlet(np.ones(len(faceV)), size=n)
        return w @ faceV

    pairs = [(classical_transposition(c, i, i + 1), classical_transposition(c - 1, i, i + 1))
             for i in range(c - 2)]
    return FaceWitness(omega, small, f"classical:{c - 1}", L, J, sampler, pairs)


def _quantum_face(c: int) -> FaceWitness:
    from .groups import haar_su
    from .instances import classical

    big = QuantumSpace.standard(c)
    P = np.zeros((c, c))
    P[c - 1, c - 1] = 1.0
    omega = big.effect_from_operator(P).dual
    if c == 2:
        small: StateSpace = classical(1).space
        name = "classical:1"
        L = np.eye(big.size)[:1]
        J = big.from_operator(np.diag([1.0, 0.0]))[:, None]
    else:
        small = QuantumSpace.standard(c - 1)
        name = f"quantum:{c - 1}"
        L = np.array([small.from_operator(B[: c - 1, : c - 1]) for B in big.basis]).T
        J = np.array([big.from_operator(np.pad(B, ((0, 1), (0, 1)))) for B in small.basis]).T

    def sampler(rng, n):
        kets = rng.standard_normal((n, c - 1)) + 1j * rng.standard_normal((n, c - 1))
        kets /= np.linalg.norm(kets, axis=1, keepdims=True)
        pures = np.array([big.state_from_ket(np.append(k, 0.0)) for k in kets])
        w = rng.dirichlet(np.ones(2), size=n)
        return w[:, :1] * pures + w[:, 1:] * np.roll(pures, 1, axis=0)

    pairs = []
    if c > 2:
        rng = np.random.default_rng(0)
        for _ in range(4):
            U = haar_su(c - 1, rng)
            big_U = np.eye(c, dtype=complex)
            big_U[: c - 1, : c - 1] = U
            pairs.append((big.represent(big_U), small.represent(U)))
    return FaceWitness(omega, small, name, L, J, sampler, pairs)


def _ball_face(space: BallSpace) -> FaceWitness:
    from .instances import classical

    b = np.zeros(space.dim)
    b[0] = 1.0
    omega = space.effect_from_bloch(0.5, 0.5 * b).dual
    anti = space.from_bloch(-b)
    L = np.eye(space.size)[:1]
    J = anti[:, None]

    def sampler(rng, n):
        return np.tile(anti, (n, 1))

    return FaceWitness(omega, classical(1).space, "classical:1", L, J, sampler)


def canonical_face_witness(instance: TheoryInstance) -> FaceWitness | RequirementResult | None:
    """Built-in identification for the instance, a ready FAIL verdict when
    the declared face cannot match, or None when nothing is shipped."""
    sp = instance.space
    if instance.family == "classical" and instance.param >= 2:
        return _classical_face(instance.param)
    if instance.family == "quantum" and isinstance(sp, QuantumSpace) and sp.c >= 2:
        return _quantum_face(sp.c)
    if isinstance(sp, BallSpace) and sp.dim >= 1:
        return _ball_face(sp)
    if instance.family == "boxworld" and instance.param == 1:
        # fiducial x = 0 measurement; its second outcome reads 1 - P(0|x=0)
        omega = np.array([1.0, -1.0, 0.0])
        vals = sp.vertices @ omega
        face = sp.vertices[np.abs(vals) <= LINALG_TOL]
        fdim = int(np.linalg.matrix_rank(face - face[0])) if len(face) else -1
        wit = {"omega": omega, "face_vertices": face, "face_dim": fdim,
               "small": "classical:1", "small_dim": 0,
               "face_pure_states": len(face), "small_pure_states": 1}
        return RequirementResult("FAIL", wit, {"face": LINALG_TOL}, 0,
                                 "face is a segment but the one-state space is a point")
    return None


def audit_r3(instance: TheoryInstance, face_spec: FaceWitness | None = None,
             witness_map: LinearMap | None = None, seed: int = 0, tol: float = DEFAULT_TOL,
             n_samples: int = 100) -> RequirementResult:
    """Check a face identification on sampled face states, effects and
    transformations. ``witness_map`` replaces the face map of ``face_spec``."""
    if face_spec is None:
        face_spec = canonical_face_witness(instance)
    if face_spec is None:
        return RequirementResult("NOT-APPLICABLE", {}, {}, seed,
                                 "no face identification supplied for this instance")
    if isinstance(face_spec, RequirementResult):
        face_spec.seed = seed
        return face_spec
    w = face_spec
    L = w.L if witness_map is None else witness_map.matrix
    big, small = instance.space, w.small
    rng = _rng(seed, "r3")
    F = w.face_sampler(rng, n_samples)
    G = small.sample_states(rng, n_samples)
    tols = {"face": tol, "membership": tol, "map": tol}
    res: dict[str, float] = {}
    bad: dict[str, Any] = {}

    def record(key: str, values: np.ndarray, rows: np.ndarray | None = None) -> None:
        values = np.atleast_1d(values)
        res[key] = float(np.max(values)) if values.size else 0.0
        if res[key] > tol and key not in bad:
            i = int(np.argmax(values))
            bad[key] = rows[i] if rows is not None else i

    record("face_omega", np.abs(F @ w.omega), F)
    record("face_membership", np.array([0.0 if big.contains(f, tol) else 1.0 for f in F]), F)
    LF = F @ L.T
    record("image_membership", np.array([0.0 if small.contains(x, tol) else 1.0 for x in LF]), F)
    JG = G @ w.J.T
    record("preimage_omega", np.abs(JG @ w.omega), G)
    record("preimage_membership", np.array([0.0 if big.contains(x, tol) else 1.0 for x in JG]), G)
    record("left_inverse", np.max(np.abs(JG @ L.T - G), axis=1), G)
    record("right_inverse", np.max(np.abs(LF @ w.J.T - F), axis=1), F)
    # effects of the small space pulled back to the face, and big effects pushed down
    es = np.array([e.dual for e in sample_effects(small, rng, 20)])
    vals = LF @ es.T
    record("pulled_effects", np.maximum(-vals.min(axis=1), vals.max(axis=1) - 1.0), F)
    eb = np.array([e.dual for e in sample_effects(big, rng, 20)])
    vals = JG @ eb.T
    record("pushed_effects", np.maximum(-vals.min(axis=1), vals.max(axis=1) - 1.0), G)
    gr = [0.0]
    for Gb, Gs in w.pairs:
        gr.append(float(np.max(np.abs(F @ Gb.T @ L.T - LF @ Gs.T))))
        gr.append(float(np.max(np.abs(F @ Gb.T @ w.omega))))
    record("transformations", np.array(gr))
    wit: dict[str, Any] = {"small": w.small_name, "face_samples": len(F),
                           "transformation_pairs": len(w.pairs), "residuals": res}
    if bad:
        key = sorted(bad)[0]
        wit["failed_check"] = key
        wit["offending"] = bad[key]
        return RequirementResult("FAIL", wit, tols, seed, f"witness map fails {key}")
    return RequirementResult("PASS", wit, tols, seed)


# ----------------------------------------------------------------------- R4


def audit_r4(instance: TheoryInstance, seed: int = 0, tol: float = DEFAULT_TOL,
             n_pairs: int = 20) -> RequirementResult:
    from .groups import transitivity_audit

    rng = _rng(seed, "r4")
    sub = int(rng.integers(0, 2**31 - 1))
    tv = transitivity_audit(instance, n_pairs=n_pairs, seed=sub, tol=tol)
    g = instance.group
    wit: dict[str, Any] = {"method": tv.method, "pairs_checked": tv.pairs_checked,
                           "max_residual": tv.max_residual,
                           "continuous_group": bool(g is not None and g.has_continuous_part)}
    if tv.witness:
        w = dict(tv.witness)
        labels = getattr(instance.space, "vertex_labels", None)
        if labels is not None and "from_index" in w:
            w["from_label"] = labels[w["from_index"]]
            w["to_label"] = labels[w["to_index"]]
        wit["pair"] = w
    notes = "continuity flag is informational"
    return RequirementResult(tv.verdict, wit, {"alignment": tol}, seed, notes)


# ----------------------------------------------------------------------- R5


def _combination_count(space: VertexSpace) -> int:
    return math.comb(2 * space.n_vertices, space.size)


def _cone_member(x: np.ndarray, gens: np.ndarray, tol: float) -> bool:
    """Whether ``x`` is a nonnegative combination of the rows of ``gens``."""
    if len(gens) == 0:
        return bool(np.max(np.abs(x)) <= tol)
    cons = [(gens[:, k], "==", float(x[k])) for k in range(gens.shape[1])]
    res = solve(LPProblem(np.zeros(len(gens)), cons), tol=tol)
    return res.optimal


def _extreme_rays(effects: np.ndarray, tol: float) -> np.ndarray:
    """Drop zero effects and those that are cone combinations of the rest."""
    E = [e for e in effects if np.max(np.abs(e)) > tol]
    keep: list[np.ndarray] = []
    for i, e in enumerate(E):
        others = np.array([f for j, f in enumerate(E) if j != i and not np.allclose(f, e, atol=tol)])
        if not _cone_member(e, others, tol):
            keep.append(e)
    return np.array(keep)


def _local_generators(instance: TheoryInstance, tol: float) -> np.ndarray | None:
    """Product generators of the effect cone for local-product policies."""
    from .lp import effect_polytope_vertices

    from .instances import boxworld_gbit

    sp = instance.space
    if instance.family == "boxworld":
        loc = _extreme_rays(effect_polytope_vertices(boxworld_gbit().space, tol), tol)
        if instance.param == 1:
            return loc
        return np.array([np.kron(a, b) for a in loc for b in loc])
    if isinstance(sp, ProductHullSpace):
        parts = [sp.partA, sp.partB]
        if not all(isinstance(p, VertexSpace) and not isinstance(p, ProductHullSpace) for p in parts):
            return None
        la, lb = (_extreme_rays(effect_polytope_vertices(p, tol), tol) for p in parts)
        return np.array([np.kron(a, b) for a in la for b in lb])
    if isinstance(sp, VertexSpace) and _combination_count(sp) <= 200000:
        return _extreme_rays(effect_polytope_vertices(sp, tol), tol)
    return None


def _effect_lp_witness(space: VertexSpace, w: np.ndarray, tol: float) -> np.ndarray | None:
    """A valid effect negative on ``w`` (separates ``w`` from the states)."""
    V = space.vertices
    cons = [(row, "<=", 1.0) for row in V] + [(row, ">=", 0.0) for row in V]
    bounds = [(-1e3, 1e3)] * space.size
    res = solve(LPProblem(w, cons, bounds), tol=tol)
    if res.optimal and res.value < -tol:
        return res.x
    return None


def _r5_generated(instance: TheoryInstance, tol: float, seed: int) -> RequirementResult:
    from .lp import enumerate_vertices

    sp = instance.space
    gens = _local_generators(instance, tol)
    tols = {"effect": tol}
    if gens is None or not isinstance(sp, VertexSpace):
        return RequirementResult("AMBIGUOUS", {"policy": instance.effect_policy}, tols, seed,
                                 "generated effect cone cannot be enumerated for these parts")
    lo_hi = np.array([sp.effect_range(g) for g in gens])
    worst = float(max(-lo_hi[:, 0].min(), lo_hi[:, 1].max() - 1.0, 0.0)) + 0.0
    wit: dict[str, Any] = {"policy": instance.effect_policy, "generators": len(gens),
                           "generator_violation": worst}
    if worst > tol:
        i = int(np.argmax(np.maximum(-lo_hi[:, 0], lo_hi[:, 1] - 1.0)))
        wit["invalid_generator"] = gens[i]
        return RequirementResult("FAIL", wit, tols, seed, "a generating product effect is invalid")
    if np.linalg.matrix_rank(gens) < sp.size:
        wit["generator_rank"] = int(np.linalg.matrix_rank(gens))
        return RequirementResult("FAIL", wit, tols, seed, "generated effects do not span the dual space")
    # dual of the generated cone, cut at psi^0 = 1
    e0 = np.zeros(sp.size)
    e0[0] = 1.0
    W = enumerate_vertices(-gens, np.zeros(len(gens)), tol, equalities=(e0[None, :], np.array([1.0])))
    outside = [w for w in W if not sp.contains(w, tol)]
    wit["dual_vertices"] = len(W)
    if outside:
        e = _effect_lp_witness(sp, outside[0], tol)
        wit["unreachable_effect"] = e
        wit["separated_point"] = outside[0]
        return RequirementResult("FAIL", wit, tols, seed,
                                 "generated effects are a proper subset of all effects")
    return RequirementResult("PASS", wit, tols, seed)


def _r5_explicit(instance: TheoryInstance, tol: float, seed: int, rng) -> RequirementResult:
    from .lp import effect_polytope_vertices

    sp = instance.space
    allowed = [e.dual for e in instance.effects]
    u = sp.unit().dual
    allowed = np.array(allowed + [u - e for e in allowed] + [np.zeros(sp.size), u])
    if isinstance(sp, VertexSpace) and _combination_count(sp) <= 200000:
        targets = effect_polytope_vertices(sp, tol)
        method = "effect-polytope"
    elif isinstance(sp, BallSpace):
        dirs = rng.standard_normal((64, sp.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        targets = np.array([sp.effect_from_bloch(0.5, 0.5 * d).dual for d in dirs])
        method = "tight-family-sample"
    else:
        targets = np.array([e.dual for e in sample_effects(sp, rng, 64)])
        method = "sampled"
    n = len(allowed)
    for t in targets:
        cons = [(allowed[:, k], "==", float(t[k])) for k in range(sp.size)]
        cons.append((np.ones(n), "==", 1.0))
        if not solve(LPProblem(np.zeros(n), cons), tol=tol).optimal:
            return RequirementResult("FAIL", {"policy": "explicit-list", "method": method,
                                              "missing_effect": t}, {"effect": tol}, seed,
                                     "a valid effect is not in the declared list's hull")
    verdict = "PASS" if method == "effect-polytope" else "AMBIGUOUS"
    return RequirementResult(verdict, {"policy": "explicit-list", "method": method,
                                       "checked": len(targets)}, {"effect": tol}, seed)


def audit_r5(instance: TheoryInstance, seed: int = 0, tol: float = DEFAULT_TOL,
             n_samples: int = 200) -> RequirementResult:
    """Compare the declared effect policy against the full effect set."""
    from .lp import effect_polytope_vertices

    sp = instance.space
    rng = _rng(seed, "r5")
    pol = instance.effect_policy
    if pol == "generated-by-local-products":
        return _r5_generated(instance, tol, seed)
    if pol == "explicit-list":
        return _r5_explicit(instance, tol, seed, rng)
    # all effects are declared allowed; confirm the extreme ones are valid
    if isinstance(sp, BallSpace):
        dirs = rng.standard_normal((n_samples, sp.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        E = [sp.effect_from_bloch(0.5, 0.5 * d) for d in dirs]
        method = "tight-family"
    elif isinstance(sp, QuantumSpace):
        kets = sp.sample_kets(rng, n_samples)
        E = [sp.effect_from_operator(np.outer(k, k.conj())) for k in kets]
        method = "rank-one-projectors"
    elif isinstance(sp, VertexSpace) and _combination_count(sp) <= 200000:
        E = [Effect(e) for e in effect_polytope_vertices(sp, tol)]
        method = "effect-polytope"
    else:
        E = sample_effects(sp, rng, n_samples)
        method = "sampled"
    ranges = np.array([sp.effect_range(e) for e in E])
    worst = float(max(-ranges[:, 0].min(), ranges[:, 1].max() - 1.0, 0.0)) + 0.0
    wit = {"policy": pol, "method": method, "effects_checked": len(E), "max_violation": worst}
    if worst > tol:
        i = int(np.argmax(np.maximum(-ranges[:, 0], ranges[:, 1] - 1.0)))
        wit["invalid_effect"] = E[i].dual
        return RequirementResult("FAIL", wit, {"effect": tol}, seed)
    return RequirementResult("PASS", wit, {"effect": tol}, seed)


# ---------------------------------------------------------------------- R5'


def _boundary_states(sp: StateSpace, rng, n: int) -> np.ndarray:
    if isinstance(sp, VertexSpace) and not isinstance(sp, ProductHullSpace):
        V = sp.vertices
        pairs = list(combinations(range(len(V)), 2))
        picks = rng.permutation(len(pairs))[: max(0, n - len(V))]
        mids = [0.5 * (V[pairs[p][0]] + V[pairs[p][1]]) for p in sorted(picks)]
        return np.vstack([V] + ([np.array(mids)] if mids else []))
    if isinstance(sp, QuantumSpace) and sp.c > 2:
        pures = sp.sample_pure(rng, n // 2)
        from .groups import haar_su

        mixed = []
        for _ in range(n - n // 2):
            U = haar_su(sp.c, rng)
            w = rng.dirichlet(np.ones(sp.c - 1))
            rho = (U[:, : sp.c - 1] * w) @ U[:, : sp.c - 1].conj().T
            mixed.append(sp.from_operator(rho))
        return np.vstack([pures, np.array(mixed)])
    return sp.sample_pure(rng, n)


def _partner(sp: StateSpace, omega: Effect, psi: np.ndarray, tol: float) -> np.ndarray | None:
    if isinstance(sp, BallSpace):
        b = sp.to_bloch(psi)
        return sp.from_bloch(-b / np.linalg.norm(b))
    if isinstance(sp, QuantumSpace):
        M = sp.effect_operator(omega)
        w, vecs = np.linalg.eigh(0.5 * (M + M.conj().T))
        k = vecs[:, 0]
        return sp.from_operator(np.outer(k, k.conj()))
    if isinstance(sp, VertexSpace):
        vals = sp.vertices @ omega.dual
        return sp.vertices[int(np.argmin(vals))]
    return None


def audit_r5prime(instance: TheoryInstance, seed: int = 0, tol: float = DEFAULT_TOL,
                  n_samples: int = 60) -> RequirementResult:
    """Each sampled boundary state has a tight effect and a partner it is
    perfectly distinguished from."""
    from .lp import find_tight_effect, is_completely_mixed

    sp = instance.space
    rng = _rng(seed, "r5prime")
    states = _boundary_states(sp, rng, n_samples)
    checked = skipped = 0
    worst = 0.0
    for psi in states:
        if is_completely_mixed(sp, psi, tol):
            skipped += 1
            continue
        checked += 1
        om = find_tight_effect(sp, psi, tol)
        if not isinstance(om, Effect):
            return RequirementResult("FAIL", {"state": psi, "reason": om.reason},
                                     {"effect": tol}, seed, "boundary state without a tight effect")
        lo, hi = sp.effect_range(om)
        q = _partner(sp, om, psi, tol)
        errs = [abs(om(psi) - 1.0), max(0.0, -lo), max(0.0, hi - 1.0)]
        if q is None or not sp.contains(q, tol):
            return RequirementResult("FAIL", {"state": psi, "effect": om.dual},
                                     {"effect": tol}, seed, "no partner state found")
        errs.append(abs(float(om.dual @ q)))
        r = max(errs)
        worst = max(worst, r)
        if r > 10 * tol:
            return RequirementResult("FAIL", {"state": psi, "partner": q, "effect": om.dual,
                                              "residual": r}, {"effect": tol}, seed,
                                     "tight effect and partner do not distinguish perfectly")
    wit = {"states_checked": checked, "completely_mixed_skipped": skipped, "max_residual": worst}
    if checked == 0:
        if isinstance(sp, VertexSpace) and sp.n_vertices == 1:
            return RequirementResult("PASS", wit, {"effect": tol}, seed,
                                     "vacuous: the only state is completely mixed")
        return RequirementResult("AMBIGUOUS", wit, {"effect": tol}, seed, "no boundary state sampled")
    return RequirementResult("PASS", wit, {"effect": 10 * tol}, seed)


# ----------------------------------------------------------------- reports


def run_audit(instance: TheoryInstance, requirements: Sequence[str] = REQUIREMENTS,
              seed: int = 0, tol: float = DEFAULT_TOL, samples: int | None = None) -> AuditReport:
    """Run the requested requirement checks on one instance."""
    t0 = time.perf_counter()
    rep = AuditReport(instance.name, int(seed))
    for key in requirements:
        key = _normalize_key(key)
        if key == "r1":
            r = audit_r1(instance, seed, tol)
        elif key == "r2":
            a, b = _r2_parts(instance)
            comp = instance if (instance.family == "boxworld" and instance.param == 2) else None
            r = audit_r2(a, b, comp, seed=seed, tol=tol)
        elif key == "r3":
            r = audit_r3(instance, seed=seed, tol=tol, n_samples=samples or 100)
        elif key == "r4":
            r = audit_r4(instance, seed, tol, n_pairs=samples or 20)
        elif key == "r5":
            r = audit_r5(instance, seed, tol, n_samples=samples or 200)
        else:
            r = audit_r5prime(instance, seed, tol, n_samples=samples or 60)
        rep.requirements[key] = r
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep


def _normalize_key(key: str) -> str:
    k = str(key).strip().lower()
    k = {"5p": "r5prime", "5'": "r5prime", "r5p": "r5prime", "r5'": "r5prime"}.get(k, k)
    if not k.startswith("r"):
        k = "r" + k
    if k not in REQUIREMENTS:
        raise DomainError(f"unknown requirement {key!r}")
    return k


def reverify_witness(instance: TheoryInstance, key: str, witness: dict[str, Any],
                     tol: float = DEFAULT_TOL) -> bool:
    """True when the recorded FAIL witness still shows the violation."""
    key = _normalize_key(key)
    if key == "r2":
        return not local_tomography_dim_check(witness["dA"], witness["dB"], witness["dAB"]) or \
            witness.get("rank", witness["expected_rank"]) < witness["expected_rank"]
    if key == "r3":
        return witness["face_dim"] != witness["small_dim"]
    if key == "r4":
        pair = witness["pair"]
        x, y = np.asarray(pair["from"]), np.asarray(pair["to"])
        g = instance.group
        mats = [instance.space.represent(e) if g.kind != "product" else e for e in g.closure()]
        return all(np.max(np.abs(G @ x - y)) > tol for G in mats)
    if key == "r5":
        if "unreachable_effect" in witness:
            e = np.asarray(witness["unreachable_effect"])
            lo, hi = instance.space.effect_range(e)
            return bool(lo >= -tol and hi <= 1 + tol
                        and float(e @ np.asarray(witness["separated_point"])) < -tol)
        if "invalid_effect" in witness:
            lo, hi = instance.space.effect_range(np.asarray(witness["invalid_effect"]))
            return bool(lo < -tol or hi > 1 + tol)
    raise DomainError(f"no independent re-check for {key} witnesses of this shape")


# ---------------------------------------------------------------- theorems


def chsh_classical(tol: float = DEFAULT_TOL) -> float:
    """LP optimum of the CHSH functional over local deterministic boxes."""
    from .instances import boxworld_pair, chsh_functional

    V = boxworld_pair().space.vertices[:16]
    return _chsh_lp(V, chsh_functional(), tol)


def chsh_boxworld(tol: float = DEFAULT_TOL) -> float:
    from .instances import boxworld_pair, chsh_functional

    return _chsh_lp(boxworld_pair().space.vertices, chsh_functional(), tol)


def _chsh_lp(V: np.ndarray, f: np.ndarray, tol: float) -> float:
    n = len(V)
    res = solve(LPProblem(V @ f, [(np.ones(n), "==", 1.0)], maximize=True), tol=tol)
    return float(res.value)


def _horodecki_value(b) -> tuple[float, float]:
    """CHSH from optimal measurement directions, evaluated through product
    effect probabilities, with the singular-value formula alongside."""
    from .bloch import product_effect_probability

    U, s, Vt = np.linalg.svd(b.C)
    t = math.atan2(s[1], s[0])
    a_dirs = [U[:, 0], U[:, 1]]
    b_dirs = [math.cos(t) * Vt[0] + math.sin(t) * Vt[1], math.cos(t) * Vt[0] - math.sin(t) * Vt[1]]

    def corr(x, y):
        return sum(sa * sb * product_effect_probability(sa * x, sb * y, b)
                   for sa in (1, -1) for sb in (1, -1))

    val = corr(a_dirs[0], b_dirs[0]) + corr(a_dirs[0], b_dirs[1]) \
        + corr(a_dirs[1], b_dirs[0]) - corr(a_dirs[1], b_dirs[1])
    return float(val), float(2.0 * math.sqrt(s[0] ** 2 + s[1] ** 2))


def chsh_quantum(n_grid: int = 64) -> float:
    """Largest CHSH value over the equator family on a grid of angles."""
    from .bloch import equator_state

    best = -np.inf
    for k in range(n_grid):
        for j in range(4):
            b = equator_state(math.pi * k / n_grid, 0.5 * math.pi * j)
            best = max(best, _horodecki_value(b)[0])
    return float(best)


def _parse_grid(grid: Sequence[int] | None) -> tuple[int, ...]:
    return (3, 5, 7) if grid is None else tuple(sorted({int(g) for g in grid}))


def run_theorem_suite(seed: int = 0, grid: Sequence[int] | None = None) -> AuditReport:
    """The fixed battery of theorem-level numeric reproductions."""
    from .bloch import (
        equator_pm,
        equator_state,
        local_action,
        partial_transpose_equivalence,
        product_bloch,
        two_gbit_bloch,
    )
    from .groups import (
        conjugated_rotation_group,
        estimate_maximally_mixed,
        haar_o,
        haar_su,
        orbit_span_rank,
        orthogonality_residual,
        orthogonalize,
        su3_block_orbit_rank,
        two_gbit_norm_preservation,
        verify_pseudo_gates,
    )
    from .hermitian import isometry_check, su2_to_so3
    from .instances import ball_gbit, classical, quantum
    from .lp import capacity

    t0 = time.perf_counter()
    rng = _rng(seed, "theorems")
    checks: list[TheoremCheck] = []

    # capacity multiplicativity
    c2, c3 = classical(2), classical(3)
    _, j = compose(c2, c3)
    cert = capacity(j.space)
    checks.append(_close("capacity classical:2*classical:3", 6, cert.value, 0))
    q2 = quantum(2)
    comp, jq = compose(q2, q2)
    poles = [q2.space.from_operator(np.diag(p)) for p in ([1.0, 0.0], [0.0, 1.0])]
    cands = [np.kron(a, b) for a in poles for b in poles]
    cands += list(jq.space.sample_pure(rng, 20))
    cert = capacity(jq.space, candidate_pures=cands)
    checks.append(_close("capacity quantum:2*quantum:2", 4, cert.value, 0))
    checks.append(_at_most("capacity quantum:2*quantum:2 residual", cert.residual, 1e-9))

    # dimension law
    for r, cs in ((1, range(1, 6)), (2, range(2, 5))):
        fam = classical if r == 1 else quantum
        for c in cs:
            checks.append(_close(f"dimension law r={r} c={c}", c**r - 1, fam(c).dim, 0))

    # two-gbit Bloch norm on the equator family and its local orbits
    worst = 0.0
    for _ in range(1000):
        b = equator_state(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        b = local_action(haar_o(3, rng), haar_o(3, rng), b)
        worst = max(worst, abs(b.norm_sq - 3.0))
    checks.append(_at_most("bloch norm identity", worst, 1e-9))

    # isometry of the Hermitian image
    J = jq.space
    pures = J.sample_pure(rng, 1000)
    mixed = J.sample_states(rng, 1000)
    worst = max(abs(lhs - rhs) for lhs, rhs in
                (isometry_check(p, m) for p, m in zip(pures, mixed)))
    checks.append(_at_most("hermitian isometry", worst, 1e-12))

    # SU(2) to SO(3)
    hom = orth = 0.0
    for _ in range(100):
        U, V = haar_su(2, rng), haar_su(2, rng)
        RU, RV, RUV = (su2_to_so3(M).matrix for M in (U, V, U @ V))
        hom = max(hom, float(np.max(np.abs(RU @ RV - RUV))))
        orth = max(orth, float(np.max(np.abs(RU.T @ RU - np.eye(3)))), abs(np.linalg.det(RU) - 1.0))
    checks.append(_at_most("su2 to so3 homomorphism", hom, 1e-12))
    checks.append(_at_most("su2 to so3 orthogonality", orth, 1e-12))

    # orbit-rank grid
    g = _parse_grid(grid)
    for d2 in g:
        classes = ("rotation", "reflection") if d2 == 3 else ("generic",)
        for cls in classes:
            rep = orbit_span_rank(d2, cls, seed=int(rng.integers(0, 2**31 - 1)))
            checks.append(_close(f"orbit rank d2={d2} {cls}", 2 if d2 == 3 else (d2 - 1) ** 2,
                                 rep.rank, 0))
            checks.append(TheoremCheck(f"orbit rank gap d2={d2} {cls} (at least)", 1e3,
                                       min(rep.singular_value_gap, 1e300), 0.0,
                                       bool(rep.singular_value_gap >= 1e3)))
    if 7 in g:
        rep = su3_block_orbit_rank(seed=int(rng.integers(0, 2**31 - 1)))
        checks.append(_at_most("su3 block orthogonality", rep.extras["orthogonality_residual"], 1e-12))
        mdim = rep.extras["min_invariant_dim"]
        checks.append(TheoremCheck("su3 product invariant dimension (at least)", 9, mdim, 0.0, mdim >= 9))

    # maximally mixed state and orthogonalization
    est = estimate_maximally_mixed(ball_gbit(3), seed=int(rng.integers(0, 2**31 - 1)))
    bl = BallSpace(3).to_bloch(est.state.coords)
    checks.append(_close("ball:3 maximally mixed bloch norm", 0.0, float(np.linalg.norm(bl)), 0.0))
    checks.append(_at_most("ball:3 maximally mixed monte carlo z", est.max_z, 3.0))
    grp = conjugated_rotation_group()
    S = orthogonalize(grp)
    checks.append(_at_most("orthogonalization residual", orthogonality_residual(S, grp), 1e-9))

    # pseudo-gates and norm preservation
    pg = verify_pseudo_gates(comp, poles[0], poles[1])
    checks.append(_at_most("pseudo-gate residual", pg.residual, 1e-12))
    checks.append(_at_most("pseudo-gate mu residual", pg.mu_residual, 1e-12))
    checks.append(_at_most("two-gbit norm preservation",
                           two_gbit_norm_preservation(comp, n=100, seed=int(rng.integers(0, 2**31 - 1))),
                           1e-9))

    # partial transposition between the rotation and reflection branches
    worst = 0.0
    for v in rng.uniform(0, 2 * math.pi, 50):
        img = partial_transpose_equivalence(equator_pm(v, 1))
        worst = max(worst, float(np.max(np.abs(img.vector() - equator_pm(v, -1).vector()))))
        a, bb = rng.standard_normal(3), rng.standard_normal(3)
        pb = product_bloch(a / np.linalg.norm(a), bb / np.linalg.norm(bb))
        twice = partial_transpose_equivalence(partial_transpose_equivalence(pb))
        worst = max(worst, float(np.max(np.abs(twice.vector() - pb.vector()))))
    checks.append(_at_most("partial transpose equivalence", worst, 1e-12))
    # equator states are consistent with the hermitian coordinates
    rt = max(float(np.max(np.abs(two_gbit_bloch(equator_state(u, 0.3).to_state()).vector()
                                 - equator_state(u, 0.3).vector()))) for u in (0.1, 1.0, 2.0))
    checks.append(_at_most("two-gbit bloch round trip", rt, 1e-12))

    # CHSH ladder
    checks.append(_close("chsh classical", 2.0, chsh_classical(), 1e-12))
    checks.append(_close("chsh boxworld", 4.0, chsh_boxworld(), 1e-12))
    checks.append(_close("chsh quantum", 2.0 * math.sqrt(2.0), chsh_quantum(), 1e-6))

    rep = AuditReport("theorem-suite", int(seed), theorems=checks)
    rep.runtime_ms = (time.perf_counter() - t0) * 1e3
    return rep
