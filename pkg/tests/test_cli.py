from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from gptkit.cli import dumps, export_spec, load_theory, main, parse_spec, SpecError, write_atomic
from gptkit.instances import from_name


def _run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip_runtime(text: str) -> dict:
    doc = json.loads(text)
    doc.pop("runtime-ms", None)
    return doc


def test_audit_exit_codes(capsys, tmp_path):
    code, out, _ = _run(["audit", "--theory", "quantum:2", "--requirements", "1,4,5", "--seed", "7"], capsys)
    assert code == 0 and set(json.loads(out)["requirements"]) == {"r1", "r4", "r5"}
    code, out, _ = _run(["audit", "--theory", "boxworld-pair", "--requirements", "4"], capsys)
    doc = json.loads(out)
    assert code == 2 and doc["requirements"]["r4"]["verdict"] == "FAIL"
    assert doc["requirements"]["r4"]["witnesses"]["pair"]["to_label"].startswith("pr")
    code, _, _ = _run(["audit", "--theory", "classical:3", "--requirements", "3"], capsys)
    assert code == 0


def test_bad_inputs_exit_1(capsys, tmp_path):
    code, _, err = _run(["audit", "--theory", "nope:3"], capsys)
    assert code == 1 and "nope" in err
    with pytest.raises(SystemExit) as exc:
        main(["audit", "--theory", "classical:3", "--requirements", "9"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["audit", "--theory", "classical:3", "--seed", "-1"])
    assert exc.value.code == 1


@pytest.mark.parametrize("doc,field", [
    ({"custom": {"dim": 2, "vertices": [[1, 0, 0], [1, 1]]}}, "custom.vertices"),
    ({"custom": {"dim": 1, "vertices": [[1, 0], [0.5, 1]]}}, "custom.vertices[1][0]"),
    ({"custom": {"dim": 1, "vertices": [[1, 0], [1, 1]], "effects": 3}}, "custom.effects"),
    ({"custom": {"dim": 1, "vertices": [[1, 0], [1, 1]], "composite": "x"}}, "custom.composite"),
    ({"custom": {"dim": 1, "vertices": [[1, 0], [1, 1]],
                 "group": {"kind": "finite-list", "elements": [[[1, 0]]]}}}, "custom.group.elements[0]"),
    ({"custom": {"dim": "2", "vertices": []}}, "custom.dim"),
    ({"builtin": "classical:3", "custom": {}}, "exactly one"),
])
def test_spec_errors_name_the_field(tmp_path, capsys, doc, field):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(doc))
    code, _, err = _run(["audit", "--theory", str(p)], capsys)
    assert code == 1 and field in err


def test_spec_json_syntax_error_reports_line(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "builtin": "classical:3",\n  oops\n}\n')
    code, _, err = _run(["audit", "--theory", str(p)], capsys)
    assert code == 1 and "line 3" in err


def test_out_is_written_atomically(tmp_path, capsys):
    out = tmp_path / "sub" / "report.json"
    code, stdout, _ = _run(["audit", "--theory", "classical:2", "--requirements", "1",
                            "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["instance"] == "classical:2"
    assert [f.name for f in out.parent.iterdir()] == ["report.json"]


def test_write_atomic_leaves_old_file_on_failure(tmp_path):
    p = tmp_path / "r.json"
    write_atomic(p, "old")

    class Boom:
        def endswith(self, _):
            raise RuntimeError("boom")

    with pytest.raises(Exception):
        write_atomic(p, Boom())
    assert p.read_text() == "old\n" and len(list(tmp_path.iterdir())) == 1


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("GPTKIT_SEED", "42")
    _, out, _ = _run(["audit", "--theory", "ball:3", "--requirements", "4"], capsys)
    assert json.loads(out)["seed"] == 42
    _, out, _ = _run(["audit", "--theory", "ball:3", "--requirements", "4", "--seed", "3"], capsys)
    assert json.loads(out)["seed"] == 3


def test_same_seed_gives_identical_json(capsys):
    args = ["audit", "--theory", "ball:3", "--seed", "9"]
    _, a, _ = _run(args, capsys)
    _, b, _ = _run(args, capsys)
    assert _strip_runtime(a) == _strip_runtime(b)
    strip = [ln for ln in a.splitlines() if "runtime-ms" not in ln]
    assert strip == [ln for ln in b.splitlines() if "runtime-ms" not in ln]


def test_theorems_grid_filter(capsys):
    code, out, _ = _run(["theorems", "--grid", "d2=3", "--seed", "1"], capsys)
    names = [t["name"] for t in json.loads(out)["theorems"]]
    assert code == 0
    assert any("d2=3" in n for n in names) and not any("d2=5" in n or "d2=7" in n for n in names)
    _, again, _ = _run(["theorems", "--grid", "d2=3", "--seed", "1"], capsys)
    assert [ln for ln in out.splitlines() if "runtime-ms" not in ln] == \
        [ln for ln in again.splitlines() if "runtime-ms" not in ln]


def test_capacity_command(capsys):
    code, out, _ = _run(["capacity", "--theory", "classical:2", "--times", "classical:3"], capsys)
    assert code == 0 and json.loads(out)["capacity"] == 6
    _, out, _ = _run(["capacity", "--theory", "ball:5"], capsys)
    assert json.loads(out)["capacity"] == 2
    _, out, _ = _run(["capacity", "--theory", "quantum:2", "--times", "quantum:2"], capsys)
    doc = json.loads(out)
    assert doc["capacity"] == 4 and doc["residual"] < 1e-9


def test_text_format(capsys):
    code, out, _ = _run(["audit", "--theory", "boxworld-pair", "--requirements", "4",
                         "--format", "text"], capsys)
    assert code == 2 and "r4" in out and "FAIL" in out and "witness" in out


@pytest.mark.parametrize("name", ["classical:3", "boxworld", "boxworld-pair"])
def test_export_round_trip(tmp_path, capsys, name):
    p = tmp_path / "t.json"
    assert main(["export", "--theory", name, "--inline", "--out", str(p)]) == 0
    reqs = "1,2,4,5,5p" if name != "boxworld-pair" else "4,5"
    args = ["audit", "--requirements", reqs, "--seed", "2"]
    _, a, _ = _run(args + ["--theory", name], capsys)
    _, b, _ = _run(args + ["--theory", str(p)], capsys)
    va = {k: v["verdict"] for k, v in json.loads(a)["requirements"].items()}
    vb = {k: v["verdict"] for k, v in json.loads(b)["requirements"].items()}
    assert va == vb


def test_builtin_spec_file(tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps(export_spec(from_name("quantum:2"))))
    assert load_theory(str(p)).space.dim == 3
    with pytest.raises(SpecError):
        parse_spec({"schema": 2, "builtin": "quantum:2"})


def test_dumps_numbers():
    text = dumps({"a": 0.1, "b": 2.0, "c": float("inf"), "d": [1, 2.5]})
    doc = json.loads(text)
    assert doc == {"a": 0.1, "b": 2.0, "c": "inf", "d": [1, 2.5]}
    assert '"b": 2.0' in text and "0.10000000000000001" in text


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "gptkit.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("gptkit")
