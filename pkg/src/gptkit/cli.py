"""Command-line driver: ``gptkit audit``, ``gptkit theorems``, ``gptkit capacity``
and ``gptkit export``.

Exit codes: 0 all checks pass, 1 bad input, 2 a FAIL, 3 an AMBIGUOUS verdict.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .audit import REQUIREMENTS, run_audit, run_theorem_suite, to_jsonable
from .core import GPTError, TheoryInstance, VertexSpace

__all__ = [
    "SpecError",
    "main",
    "build_parser",
    "load_theory",
    "parse_spec",
    "export_spec",
    "dumps",
    "write_atomic",
    "cmd_audit",
    "cmd_theorems",
    "cmd_capacity",
    "cmd_export",
]

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_AMBIGUOUS = 0, 1, 2, 3


class SpecError(GPTError, ValueError):
    """Malformed theory spec; the message names the offending field."""


# ------------------------------------------------------------ serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    obj = to_jsonable(obj)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory and rename over."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ------------------------------------------------------------- theory specs


def _matrix(value: Any, where: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: expected an array of numbers") from exc
    if M.ndim != 2:
        raise SpecError(f"{where}: expected a 2-d array, got {M.ndim} dimension(s)")
    if shape is not None and M.shape != shape:
        raise SpecError(f"{where}: expected shape {list(shape)}, got {list(M.shape)}")
    if not np.all(np.isfinite(M)):
        raise SpecError(f"{where}: contains non-finite numbers")
    return M


def _parse_group(g: Any, size: int, where: str):
    from .groups import GroupSpec

    if g is None:
        return GroupSpec.trivial(size)
    if not isinstance(g, dict):
        raise SpecError(f"{where}: expected an object")
    kind = g.get("kind")
    if kind == "trivial":
        return GroupSpec.trivial(size)
    if kind in ("finite-list", "generated"):
        key = "elements" if kind == "finite-list" else "generators"
        mats = g.get(key)
        if not isinstance(mats, list) or not mats:
            raise SpecError(f"{where}.{key}: expected a non-empty array of matrices")
        ms = [_matrix(m, f"{where}.{key}[{i}]", (size, size)) for i, m in enumerate(mats)]
        return GroupSpec.finite(ms) if kind == "finite-list" else GroupSpec.generated_by(ms)
    if kind == "named-continuous":
        raise SpecError(f"{where}.kind: named continuous groups need a ball or quantum builtin")
    raise SpecError(f"{where}.kind: expected finite-list, generated or trivial, got {kind!r}")


def parse_spec(doc: Any, source: str = "<spec>") -> TheoryInstance:
    """Build an instance from a parsed TheorySpecFile document."""
    from .instances import from_name

    if not isinstance(doc, dict):
        raise SpecError(f"{source}: top level must be an object")
    if "schema" in doc and doc["schema"] != SCHEMA:
        raise SpecError(f"{source}: schema: unsupported version {doc['schema']!r}")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SpecError(f"{source}: name: expected a string")
    has_b, has_c = "builtin" in doc, "custom" in doc
    if has_b == has_c:
        raise SpecError(f"{source}: exactly one of builtin or custom is required")
    if has_b:
        if not isinstance(doc["builtin"], str):
            raise SpecError(f"{source}: builtin: expected a string")
        try:
            inst = from_name(doc["builtin"])
        except GPTError as exc:
            raise SpecError(f"{source}: builtin: {exc}") from exc
        if name:
            inst.name = name
        return inst

    c = doc["custom"]
    where = f"{source}: custom"
    if not isinstance(c, dict):
        raise SpecError(f"{where}: expected an object")
    dim = c.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise SpecError(f"{where}.dim: expected a non-negative integer")
    if "vertices" not in c:
        raise SpecError(f"{where}.vertices: missing")
    V = _matrix(c["vertices"], f"{where}.vertices")
    if V.shape[1] != dim + 1:
        raise SpecError(f"{where}.vertices: rows need {dim + 1} entries, got {V.shape[1]}")
    bad = np.flatnonzero(np.abs(V[:, 0] - 1.0) > 1e-12)
    if bad.size:
        raise SpecError(f"{where}.vertices[{bad[0]}][0]: normalization entry must be 1")
    effects_field = c.get("effects", "all")
    effects: list[np.ndarray] = []
    if effects_field == "all":
        policy = "all-effects"
    elif effects_field == "local-products":
        policy = "generated-by-local-products"
    elif isinstance(effects_field, list):
        policy = "explicit-list"
        effects = [_matrix([e], f"{where}.effects[{i}]", (1, dim + 1))[0]
                   for i, e in enumerate(effects_field)]
    else:
        raise SpecError(f"{where}.effects: expected \"all\", \"local-products\" or an array")
    rule = c.get("composite", "local-tomography-min")
    if rule not in TheoryInstance.RULES:
        raise SpecError(f"{where}.composite: expected one of {list(TheoryInstance.RULES)}, got {rule!r}")
    family = c.get("family", "custom")
    if not isinstance(family, str):
        raise SpecError(f"{where}.family: expected a string")
    try:
        space = VertexSpace(V)
        group = _parse_group(c.get("group"), dim + 1, f"{where}.group")
        return TheoryInstance(name or "custom", space, policy, group, rule,
                              family=family, param=c.get("param"), effects=effects)
    except SpecError:
        raise
    except GPTError as exc:
        raise SpecError(f"{where}: {exc}") from exc


def load_theory(arg: str) -> TheoryInstance:
    """Resolve ``--theory``: a builtin name or a path to a spec file."""
    from .instances import from_name

    p = Path(arg)
    if p.suffix == ".json" or p.exists():
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise SpecError(f"{arg}: cannot read ({exc.strerror})") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{arg}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return parse_spec(doc, arg)
    try:
        return from_name(arg)
    except GPTError as exc:
        raise SpecError(str(exc)) from exc


def export_spec(instance: TheoryInstance, inline: bool = False) -> dict[str, Any]:
    """TheorySpecFile for ``instance``; ``inline`` writes vertex data out."""
    doc: dict[str, Any] = {"schema": SCHEMA, "name": instance.name}
    if not inline:
        doc["builtin"] = instance.name
        return doc
    sp = instance.space
    if not isinstance(sp, VertexSpace):
        raise SpecError(f"{instance.name}: only vertex-list spaces can be written inline")
    if instance.effect_policy == "all-effects":
        effects: Any = "all"
    elif instance.effect_policy == "generated-by-local-products":
        effects = "local-products"
    else:
        effects = [e.dual for e in instance.effects]
    g = instance.group
    if g is None or (g.kind == "finite-list" and len(g.elements) == 1):
        group: dict[str, Any] = {"kind": "trivial"}
    elif g.kind == "generated":
        group = {"kind": "generated", "generators": list(g.generators)}
    elif g.kind == "finite-list":
        group = {"kind": "finite-list", "elements": list(g.elements)}
    else:
        raise SpecError(f"{instance.name}: group kind {g.kind!r} cannot be written inline")
    doc["custom"] = to_jsonable({
        "dim": sp.dim, "vertices": sp.vertices, "effects": effects, "group": group,
        "composite": instance.composite_rule, "family": instance.family, "param": instance.param,
    })
    return doc


# ----------------------------------------------------------------- commands


def _default_seed() -> int:
    env = os.environ.get("GPTKIT_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return _u64(env)
    except argparse.ArgumentTypeError:
        return 0


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64), got {v}")
    return v


def _requirements(text: str) -> list[str]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        key = {"5p": "r5prime", "5'": "r5prime", "r5p": "r5prime"}.get(tok, tok)
        key = key if key.startswith("r") else "r" + key
        if key not in REQUIREMENTS:
            raise argparse.ArgumentTypeError(f"unknown requirement {tok!r}; use 1,2,3,4,5,5p")
        if key not in out:
            out.append(key)
    if not out:
        raise argparse.ArgumentTypeError("no requirements given")
    return out


def _grid(text: str) -> list[int]:
    body = text.split("=", 1)[1] if "=" in text else text
    try:
        vals = sorted({int(t) for t in body.split(",") if t.strip()})
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected d2=3,5,7") from exc
    if not vals or any(v not in (3, 5, 7) for v in vals):
        raise argparse.ArgumentTypeError(f"grid values must be among 3, 5, 7; got {text!r}")
    return vals


def _report_text(rep) -> str:
    lines = [f"gptkit {__version__}  instance={rep.instance}  seed={rep.seed}"]
    for k, r in rep.to_dict()["requirements"].items():
        note = f"  ({r['notes']})" if r["notes"] else ""
        lines.append(f"{k:8s} {r['verdict']}{note}")
        if r["verdict"] in ("FAIL", "AMBIGUOUS"):
            wit = json.dumps(r["witnesses"], sort_keys=True)
            lines.append(f"         witness: {wit[:240]}{'...' if len(wit) > 240 else ''}")
    for t in rep.theorems:
        lines.append(f"{'PASS' if t.passed else 'FAIL'}  {t.name}: observed {t.observed:.12g}, "
                     f"expected {t.expected:.12g}, tolerance {t.tolerance:.3g}")
    lines.append(f"runtime {rep.runtime_ms:.0f} ms")
    return "\n".join(lines)


def cmd_audit(args: argparse.Namespace) -> int:
    inst = load_theory(args.theory)
    rep = run_audit(inst, args.requirements, seed=args.seed, tol=args.tol, samples=args.samples)
    text = dumps(rep.to_dict()) if args.format == "json" else _report_text(rep)
    _emit(text, args.out)
    return rep.exit_code()


def cmd_theorems(args: argparse.Namespace) -> int:
    rep = run_theorem_suite(seed=args.seed, grid=args.grid)
    text = dumps(rep.to_dict()) if args.format == "json" else _report_text(rep)
    _emit(text, args.out)
    return rep.exit_code()


def _candidates(inst: TheoryInstance, rng: np.random.Generator, n: int) -> np.ndarray:
    from .core import BallSpace, QuantumSpace

    sp = inst.space
    if isinstance(sp, VertexSpace) and sp.n_vertices <= 64:
        return sp.vertices
    if isinstance(sp, BallSpace):
        e = np.zeros(sp.dim)
        e[0] = 1.0
        return np.vstack([sp.from_bloch(e), sp.from_bloch(-e), sp.sample_pure(rng, n - 2)])
    if isinstance(sp, QuantumSpace):
        basis = [sp.state_from_ket(np.eye(sp.c)[k]) for k in range(sp.c)]
        return np.vstack([basis, sp.sample_pure(rng, max(0, n - sp.c))])
    return sp.sample_pure(rng, n)


def cmd_capacity(args: argparse.Namespace) -> int:
    from .composite import compose
    from .lp import capacity

    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 99]))
    inst = load_theory(args.theory)
    if args.times:
        other = load_theory(args.times)
        _, joint = compose(inst, other, seed=args.seed)
        ca, cb = _candidates(inst, rng, 4), _candidates(other, rng, 4)
        cands = [np.kron(a, b) for a in ca for b in cb][:44]
        if not (isinstance(joint.space, VertexSpace) and joint.space.n_vertices <= 64):
            cands += list(joint.space.sample_pure(rng, 64 - len(cands) if len(cands) < 44 else 20))
        name = joint.name
        space = joint.space
    else:
        cands = list(_candidates(inst, rng, 50))
        name, space = inst.name, inst.space
    t0 = time.perf_counter()
    cert = capacity(space, max_c=args.max_c, candidate_pures=cands[:64])
    doc = {
        "schema": SCHEMA, "tool-version": __version__, "seed": args.seed, "instance": name,
        "capacity": cert.value, "pool_size": cert.pool_size,
        "upper_bound_certified": cert.upper_bound_certified, "residual": cert.residual,
        "states": [s.coords for s in cert.states],
        "measurement": [e.dual for e in cert.measurement.effects],
        "runtime-ms": (time.perf_counter() - t0) * 1e3,
    }
    if args.format == "json":
        _emit(dumps(doc), args.out)
    else:
        bound = "certified over the pool" if cert.upper_bound_certified else "lower bound"
        _emit(f"{name}: capacity {cert.value} ({bound}; pool {cert.pool_size}, "
              f"residual {cert.residual:.3g})", args.out)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    inst = load_theory(args.theory)
    _emit(dumps(export_spec(inst, inline=args.inline)), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for FAIL verdicts."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gptkit", description="GPT toolkit and axiom auditor")
    ap.add_argument("--version", action="version", version=f"gptkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=_u64, default=_default_seed(),
                       help="random seed (default: $GPTKIT_SEED or 0)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("audit", help="run requirement audits on one theory")
    p.add_argument("--theory", required=True, help="builtin name (e.g. quantum:2) or spec file")
    p.add_argument("--requirements", type=_requirements, default=list(REQUIREMENTS),
                   help="comma list from 1,2,3,4,5,5p (default: all)")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("theorems", help="run the theorem battery")
    p.add_argument("--grid", type=_grid, default=[3, 5, 7], help="orbit-rank grid, e.g. d2=3,5,7")
    common(p)
    p.set_defaults(func=cmd_theorems)

    p = sub.add_parser("capacity", help="capacity certificate of a theory or a composite")
    p.add_argument("--theory", required=True)
    p.add_argument("--times", help="second factor of a composite")
    p.add_argument("--max-c", dest="max_c", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("export", help="write a theory spec file")
    p.add_argument("--theory", required=True)
    p.add_argument("--inline", action="store_true", help="write vertex data instead of the builtin name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"gptkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GPTError as exc:
        print(f"gptkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
