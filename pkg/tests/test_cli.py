import json
import subprocess
import sys

import numpy as np
import pytest

from aybe.builder import r_jordan
from aybe.cli import main, parse_complex
from aybe.kronecker import Elliptic, sigma
from aybe.tensors import MatTensor
from aybe.theta import TorusParam
from aybe.verifier import aybe_residual


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


J2 = {"n": 2, "blocks": [{"lambda": {"re": 0, "im": 0}, "size": 2}]}
J1 = {"n": 1, "blocks": [{"lambda": {"re": 0, "im": 0}, "size": 1}]}


@pytest.fixture
def j2_path(tmp_path):
    p = tmp_path / "j2.json"
    p.write_text(json.dumps(J2))
    return p


def test_parse_complex():
    assert parse_complex("i") == 1j
    assert parse_complex("2i") == 2j
    assert parse_complex("0.3+1.7i") == 0.3 + 1.7j
    assert parse_complex("-0.5") == -0.5


def test_eval_values(capsys):
    code, out, _ = run(["eval", "sigma", "--u", "0.2", "--x", "0.3", "--tau", "i", "--format", "json"], capsys)
    assert code == 0
    val = json.loads(out)["value"]
    assert complex(val["re"], val["im"]) == pytest.approx(sigma(Elliptic(TorusParam(1j)), 0.2, 0.3))
    code, out, _ = run(["eval", "theta1", "--z", "0", "--tau", "i"], capsys)
    assert code == 0 and out.strip() == "0+0i"
    code, out, _ = run(["eval", "sigma", "--kind", "rational", "--u", "2", "--x", "3"], capsys)
    assert out.startswith("0.8333333333333")


def test_eval_order(capsys):
    code, out, _ = run(["--tau", "2i", "eval", "theta3", "--z", "0.1", "--order", "2", "--format", "json"], capsys)
    obj = json.loads(out)
    assert code == 0 and len(obj["derivatives"]) == 3


def test_eval_singular_reports_point(capsys):
    code, _, err = run(["eval", "sigma", "--u", "1+i", "--x", "0.3"], capsys)
    assert code == 2 and "1+1i" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["eval", "sigma", "--tau", "-i", "--u", "1", "--x", "1"])
    assert info.value.code == 2
    code, _, _ = run(["eval", "theta1"], capsys)
    assert code == 2


def test_build_matches_library(j2_path, capsys):
    code, out, _ = run(["build", str(j2_path), "--v", "0.3+0.2i", "--y", "0.1+0.4i", "--oracle"], capsys)
    assert code == 0
    obj = json.loads(out)
    t = MatTensor.from_records(obj["records"])
    ref = r_jordan(2, 0.3 + 0.2j, 0.1 + 0.4j, TorusParam(1j))
    assert np.array_equal(t.coeff, ref.coeff)
    assert obj["max_rel_difference"] < 1e-9
    assert len(obj["oracle_records"]) == 16


def test_build_scalar(tmp_path, capsys):
    p = tmp_path / "j1.json"
    p.write_text(json.dumps(J1))
    code, out, _ = run(["build", str(p), "--v", "0.3", "--y", "0.2i", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 2
    re, im = map(float, lines[1].split(",")[4:])
    assert complex(re, im) == pytest.approx(sigma(Elliptic(TorusParam(1j)), 0.3, 0.2j), rel=1e-15)


def test_build_round_trip_residuals(j2_path, tmp_path, capsys):
    tp = TorusParam(1j)
    pts = {"u": 0.31 + 0.22j, "v": 0.27 + 0.35j, "x": 0.18 + 0.41j, "y": 0.52 + 0.13j}
    pairs = {
        (pts["u"], pts["x"]),
        (pts["u"] + pts["v"], pts["y"]),
        (pts["u"] + pts["v"], pts["x"] + pts["y"]),
        (-pts["v"], pts["x"]),
        (pts["v"], pts["y"]),
        (pts["u"], pts["x"] + pts["y"]),
    }
    cache = {}
    for v, y in pairs:
        out = tmp_path / "t.json"
        fmt = lambda z: repr(complex(z)).strip("()").replace("j", "i")  # noqa: E731
        code = main(["build", str(j2_path), f"--v={fmt(v)}", f"--y={fmt(y)}", "--out", str(out)])
        assert code == 0
        cache[v, y] = MatTensor.from_records(json.loads(out.read_text())["records"])
    capsys.readouterr()
    parsed = aybe_residual(lambda v, y: cache[v, y], *pts.values())
    direct = aybe_residual(lambda v, y: r_jordan(2, v, y, tp), *pts.values())
    assert parsed == direct


def test_build_schema_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 2, "blocks": [{"lambda": "zero", "size": 2}]}))
    code, _, err = run(["build", str(p), "--v", "0.3", "--y", "0.2i"], capsys)
    assert code == 2 and "complex" in err


def test_verify_default_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--count", "4", "--seed", "7", "--out", str(a)]) == 0
    assert main(["verify", "--count", "4", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["passed"] is True


def test_verify_corrupted_exit_1(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps([{"name": "bad", "family": "jordan", "n": 2, "perturb": {"a": 1, "b": 2, "c": 1, "d": 2, "delta": 1e-3}}]))
    code, out, err = run(["verify", str(cfg), "--count", "4", "--format", "text"], capsys)
    assert code == 1
    assert "FAIL bad aybe" in err


def test_verify_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps([{"family": "diagonal", "lambdas": [{"re": 0}, {"re": 0.3}], "identities": ["aybe"]}]))
    code, out, _ = run(["verify", str(cfg), "--count", "3", "--format", "csv"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 4


def test_table(capsys):
    code, out, _ = run(["table", "2"], capsys)
    assert code == 0
    assert out.splitlines() == ["nabla[0,0] = 1", "nabla[0,1] = -∇", "nabla[1,0] = ∇", "nabla[1,1] = -∇²"]
    code, out, _ = run(["table", "3", "--format", "latex"], capsys)
    assert "-\\frac{1}{4}\\nabla^{2} + \\frac{1}{4}\\nabla^{4}" in out
    code, out, _ = run(["table", "1", "--format", "json"], capsys)
    assert json.loads(out)["entries"] == [{"k": 0, "l": 0, "coeffs": ["1"], "text": "1"}]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aybe", "table", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "nabla[1,1] = -∇²" in proc.stdout
