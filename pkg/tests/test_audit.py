from __future__ import annotations

import json
import math

import numpy as np
import pytest

from gptkit.audit import (
    AuditReport,
    REQUIREMENTS,
    audit_r1,
    audit_r2,
    audit_r3,
    audit_r4,
    audit_r5,
    audit_r5prime,
    canonical_face_witness,
    chsh_boxworld,
    chsh_classical,
    chsh_quantum,
    reverify_witness,
    run_audit,
    run_theorem_suite,
)
from gptkit.composite import compose
from gptkit.core import DomainError, TheoryInstance, VertexSpace
from gptkit.groups import GroupSpec
from gptkit.instances import ball_gbit, boxworld_gbit, boxworld_pair, classical, quantum


def test_r1_examples():
    r = audit_r1(ball_gbit(3))
    assert r.verdict == "PASS" and r.witnesses["d2"] == 3
    r = audit_r1(classical(2))
    assert r.verdict == "PASS" and r.witnesses["d2"] == 1 and r.witnesses["gbit_capacity"] == 2
    r = audit_r1(ball_gbit(99))
    assert r.verdict == "PASS" and r.witnesses["d2"] == 99


def test_r2_examples():
    q = quantum(2)
    r = audit_r2(q, q)
    assert r.verdict == "PASS" and r.witnesses["dAB"] == 15 and r.witnesses["rank"] == 16
    bad = audit_r2(q, q, joint_dim=16)
    assert bad.verdict == "FAIL" and bad.witnesses["expected_dAB"] == 15
    assert reverify_witness(q, "r2", bad.witnesses)
    c = classical(2)
    r = audit_r2(c, c)
    assert r.verdict == "PASS" and r.witnesses["dAB"] == 3


def test_r3_examples():
    assert audit_r3(classical(3)).verdict == "PASS"
    r = audit_r3(quantum(3))
    assert r.verdict == "PASS" and r.witnesses["face_samples"] == 100
    sq = audit_r3(boxworld_gbit())
    assert sq.verdict == "FAIL" and sq.witnesses["face_dim"] == 1
    assert reverify_witness(boxworld_gbit(), "r3", sq.witnesses)
    assert audit_r3(boxworld_pair()).verdict == "NOT-APPLICABLE"


def test_r3_rejects_a_wrong_witness_map():
    from gptkit.core import LinearMap

    w = canonical_face_witness(classical(3))
    scaled = LinearMap(np.diag([1.0, 0.5]) @ w.L)
    r = audit_r3(classical(3), w, witness_map=scaled)
    assert r.verdict == "FAIL" and "failed_check" in r.witnesses


def test_r4_examples():
    assert audit_r4(ball_gbit(3)).verdict == "PASS"
    assert audit_r4(ball_gbit(3)).witnesses["continuous_group"] is True
    for c in (2, 3, 5):
        assert audit_r4(classical(c)).verdict == "PASS"
    r = audit_r4(boxworld_pair())
    assert r.verdict == "FAIL"
    pair = r.witnesses["pair"]
    assert pair["from_label"].startswith("det") and pair["to_label"].startswith("pr")
    assert reverify_witness(boxworld_pair(), "r4", r.witnesses)


def test_r5_examples():
    assert audit_r5(ball_gbit(3)).verdict == "PASS"
    sq = audit_r5(boxworld_gbit())
    assert sq.verdict == "PASS"
    r = audit_r5(boxworld_pair())
    assert r.verdict == "PASS" and r.witnesses["dual_vertices"] == 24


def test_r5_generated_subset_gives_witness():
    # the min composite of two squares: product effects generate a smaller
    # cone than all valid effects, so a PR-like point separates them
    _, inst = compose(boxworld_gbit(), boxworld_gbit(), rule="local-tomography-min")
    r = audit_r5(inst)
    assert r.verdict == "FAIL" and r.witnesses["unreachable_effect"] is not None
    assert reverify_witness(inst, "r5", r.witnesses)


def test_r5_explicit_list():
    base = classical(3)
    full = TheoryInstance("c3-list", base.space, "explicit-list", base.group, "classical",
                          effects=[np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]),
                                   np.array([1.0, -1.0, -1.0])])
    assert audit_r5(full).verdict == "PASS"
    # two indicators and their complements miss the third indicator
    short = TheoryInstance("c3-short", base.space, "explicit-list", base.group, "classical",
                           effects=[np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])])
    r = audit_r5(short)
    assert r.verdict == "FAIL" and "missing_effect" in r.witnesses


def test_r5prime_examples():
    r = audit_r5prime(ball_gbit(3))
    assert r.verdict == "PASS" and r.witnesses["states_checked"] > 0
    assert audit_r5prime(classical(1)).verdict == "PASS"
    assert audit_r5prime(boxworld_gbit()).verdict == "PASS"


@pytest.mark.parametrize("name", ["classical:3", "quantum:2"])
def test_cpt_and_qt_pass_everything(name):
    from gptkit.instances import from_name

    rep = run_audit(from_name(name), seed=11)
    assert all(v == "PASS" for v in rep.verdicts().values()), rep.verdicts()
    assert rep.exit_code() == 0


def test_audit_is_deterministic():
    a = run_audit(ball_gbit(3), seed=5).to_dict(runtime=False)
    b = run_audit(ball_gbit(3), seed=5).to_dict(runtime=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = run_audit(ball_gbit(3), seed=6).to_dict(runtime=False)
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)


def test_report_structure_and_exit_codes():
    rep = run_audit(boxworld_pair(), ["4", "5p"], seed=0)
    d = rep.to_dict()
    assert set(d["requirements"]) == {"r4", "r5prime"} and d["schema"] == 1
    assert rep.exit_code() == 2
    amb = AuditReport("x", 0)
    amb.requirements["r1"] = audit_r1(classical(2))
    assert amb.exit_code() == 0
    amb.requirements["r1"].verdict = "AMBIGUOUS"
    assert amb.exit_code() == 3
    with pytest.raises(DomainError):
        run_audit(classical(2), ["r9"])
    assert REQUIREMENTS[-1] == "r5prime"


def test_chsh_ladder():
    assert chsh_classical() == pytest.approx(2.0, abs=1e-12)
    assert chsh_boxworld() == pytest.approx(4.0, abs=1e-12)
    assert chsh_quantum() == pytest.approx(2 * math.sqrt(2), abs=1e-6)


def test_theorem_suite_small_grid():
    rep = run_theorem_suite(seed=0, grid=[3])
    names = [t.name for t in rep.theorems]
    assert all(t.passed for t in rep.theorems), [t.name for t in rep.theorems if not t.passed]
    assert not any("d2=5" in n or "d2=7" in n for n in names)
    assert any("d2=3" in n for n in names)
