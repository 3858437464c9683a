import json
import subprocess
import sys

import pytest

from matbochner.cli import main, parse_params


def run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, json.loads(out.read_text()), out


def statuses(manifest):
    return {c["check"]: c["status"] for c in manifest["checks"]}


def test_verify_exact_cg2x2(tmp_path):
    code, man, _ = run(tmp_path, "verify", "--weight", "builtin:cg2x2", "--mode", "exact", "--nmax", "8")
    assert code == 0
    assert set(statuses(man)) >= {"symmetry", "orthogonality", "recursions", "eigen", "fourier",
                                  "representation"}
    assert all(s == "pass" for s in statuses(man).values())
    assert man["summary"]["fail"] == 0


def test_manifest_shape(tmp_path):
    _, man, _ = run(tmp_path, "verify", "--checks", "symmetry")
    assert set(man) == {"command", "parameters", "mode", "seed", "tool_version", "assumptions",
                        "checks", "summary"}
    rec = man["checks"][0]
    assert set(rec) == {"check", "status", "paper_ref", "details"}


def test_verify_ex3x3_symmetry(tmp_path):
    code, man, _ = run(tmp_path, "verify", "--weight", "builtin:ex3x3", "--checks", "symmetry")
    assert code == 0 and statuses(man) == {"symmetry": "pass"}


def test_perturbed_operator_fails(tmp_path):
    code, man, _ = run(tmp_path, "verify", "--op", "builtin:d_cg2x2_perturbed",
                       "--checks", "symmetry,eigen")
    assert code == 1
    assert statuses(man) == {"symmetry": "fail", "eigen": "fail"}


def test_numeric_verify(tmp_path):
    code, man, _ = run(tmp_path, "verify", "--mode", "numeric", "--params", "a=2,b=1/2")
    assert code == 0
    assert "quadrature" in statuses(man)


def test_ansatz_order_4(tmp_path):
    code, man, _ = run(tmp_path, "ansatz", "--order", "4")
    assert code == 0
    dims = next(c for c in man["checks"] if c["check"] == "dimensions")["details"]
    assert dims["dimensions"] == [2, 2, 3] and dims["orders"] == [2, 3, 4]


def test_ansatz_order_0(tmp_path):
    code, man, _ = run(tmp_path, "ansatz", "--order", "0")
    assert code == 0
    dims = next(c for c in man["checks"] if c["check"] == "dimensions")["details"]
    assert dims["dimensions"] == [1] and dims["orders"] == [0]


def test_ansatz_wtilde_witnesses(tmp_path):
    _, man, _ = run(tmp_path, "ansatz", "--weight", "builtin:wtilde", "--order", "2")
    full = next(c for c in man["checks"] if c["check"] == "fullness")
    assert full["details"]["verdict"] == "fullness witnesses found"


def test_ops(tmp_path):
    code, man, _ = run(tmp_path, "ops", "--n", "3")
    assert code == 0
    rec = next(c for c in man["checks"] if c["check"] == "closed_forms")
    assert rec["details"]["M"] == [["1", "3*a*b"], ["0", "(3*a^2 + 2*E)"]]


def test_fourier_verdicts(tmp_path):
    code, man, _ = run(tmp_path, "fourier", "--op", "dtilde2_conjugated.json")
    assert code == 0
    code, man, _ = run(tmp_path, "fourier", "--op", "lower_left_unit.json", name="b.json")
    assert code == 1
    assert "-2*b" in json.dumps(man)


def test_deterministic_output(tmp_path):
    _, _, p1 = run(tmp_path, "ansatz", "--order", "2", name="1.json")
    _, _, p2 = run(tmp_path, "ansatz", "--order", "2", name="2.json")
    assert p1.read_bytes() == p2.read_bytes()


@pytest.mark.parametrize("args", [
    ["verify", "--weight", "builtin:nope"],
    ["verify", "--mode", "numeric"],
    ["verify", "--checks", "bogus"],
    ["frobnicate"],
    ["verify", "--op", "/nonexistent/op.json"],
])
def test_usage_errors(args, capsys):
    assert main(args) == 2


def test_malformed_operator_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"size": 2, "params": ["a"], "terms": [{"dorder": 0, "matrix": [["x^", "0"], ["0", "1"]]}]}')
    assert main(["fourier", "--op", str(bad)]) == 2


def test_parse_params():
    from fractions import Fraction

    assert parse_params("a=1,b=1/2") == {"a": Fraction(1), "b": Fraction(1, 2)}
    assert parse_params("a=0.5")["a"] == 0.5


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matbochner.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
