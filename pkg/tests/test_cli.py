import io
import json
import subprocess
import sys

import pytest

from vdpkit.cli import main
from vdpkit.poly import parse
from vdpkit.report import load_report


def run(argv, tmp_path=None):
    out = io.StringIO()
    if tmp_path is not None and argv[0] in ("verify", "flow") and "--report" not in argv:
        argv = argv + ["--report", str(tmp_path / "r.json")]
    code = main(argv, out)
    return code, out.getvalue()


def test_build_3():
    code, text = run(["build", "3"])
    assert code == 0
    assert text.splitlines()[0] == "z1 + z3 + z1*z2*z3 - 1"
    assert "M_3[2,1] = z1 + z3 + z1*z2*z3" in text


def test_build_4_output_parses():
    code, text = run(["build", "4"])
    assert code == 0
    lines = text.splitlines()
    p = parse(lines[0], 4)
    f = parse(lines[1].split("=", 1)[1], 4)
    g = parse(lines[2].split("=", 1)[1], 4)
    assert f * parse("z4", 4) - g == p


def test_build_bad_args(capsys):
    assert run(["build", "2"])[0] == 2
    assert run(["build"])[0] == 2
    assert run(["frobnicate"])[0] == 2


def test_verify_homology(tmp_path):
    code, text = run(["verify", "homology", "--n-max", "20"], tmp_path)
    assert code == 0
    doc = load_report(str(tmp_path / "r.json"))
    assert doc["verdict"] == "pass"
    assert any(r["operation"] == "cross_check" for r in doc["records"])
    assert "X_20" in text


def test_verify_homology_tex(tmp_path):
    code, text = run(["verify", "homology", "--n-max", "8", "--tex"], tmp_path)
    assert code == 0 and "\\begin{tabular}" in text


def test_verify_family(tmp_path):
    code, _ = run(["verify", "family", "--n-max", "7"], tmp_path)
    assert code == 0
    ops = {r["operation"] for r in load_report(str(tmp_path / "r.json"))["records"]}
    assert {"check_smooth", "modification_decomposition", "check_divisor_complement",
            "check_center_iso"} <= ops


@pytest.mark.slow
def test_verify_all(tmp_path):
    code, text = run(["verify", "all"], tmp_path)
    assert code == 0 and "overall PASS" in text


def test_budget_exhaustion(tmp_path):
    code, _ = run(["verify", "family", "--n-max", "5", "--budget", "1"], tmp_path)
    assert code == 3


def test_budget_env(tmp_path):
    r = subprocess.run([sys.executable, "-m", "vdpkit", "verify", "family", "--n-max", "5",
                        "--report", str(tmp_path / "e.json")],
                       env={"VDPKIT_BUDGET": "1", "PATH": ""}, capture_output=True, text=True)
    assert r.returncode == 3


def test_bad_config_is_usage_error(tmp_path):
    assert run(["verify", "homology", "--budget", "0"], tmp_path)[0] == 2
    assert run(["verify", "homology", "--n-max", "2"], tmp_path)[0] == 2


def test_realize():
    code, text = run(["realize", "3", "z1"])
    assert code == 0 and "residual: 0" in text
    code, text = run(["realize", "3", "0"])
    assert code == 0 and "sum()" in text
    code, text = run(["realize", "4", "z2 dz3"])
    assert code == 0 and "residual: 0" in text


def test_realize_bad_input():
    assert run(["realize", "3", "z1 +"])[0] == 2
    assert run(["realize", "4", "z1"])[0] == 2


def test_flow(tmp_path):
    code, text = run(["flow", "3", "1", "2", "--t", "1", "--steps", "1000"], tmp_path)
    assert code == 0
    drift = float(text.split("drift:")[1].split()[0])
    assert drift < 1e-9


def test_flow_zero_time():
    code, text = run(["flow", "3", "1", "2", "--t", "0", "--steps", "10"])
    assert code == 0 and "drift: 0.000e+00" in text


def test_flow_bad_indices():
    assert run(["flow", "3", "1", "1"])[0] == 2
    assert run(["flow", "3", "1", "4"])[0] == 2


def test_flow_tolerance_violation():
    code, _ = run(["flow", "3", "1", "2", "--steps", "3", "--t", "1", "--tol-drift", "1e-15"])
    assert code == 1


def test_report_schema_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "homology", "--n-max", "9", "--report", str(a)])[0] == 0
    assert run(["verify", "homology", "--n-max", "9", "--report", str(b)])[0] == 0
    assert a.read_text() == b.read_text()
    doc = json.loads(a.read_text())
    assert set(doc) == {"schema", "version", "config", "run", "notes", "records", "summary", "verdict"}
    for r in doc["records"]:
        assert set(r) == {"module", "operation", "inputs", "verdict", "payload"}
        assert r["verdict"] in ("pass", "fail")
    assert doc["summary"]["total"] == len(doc["records"])


def test_report_roundtrip(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "forms", "--seed", "3", "--report", str(a)])[0] == 0
    assert run(["verify", "forms", "--from-report", str(a), "--report", str(b)])[0] == 0
    assert a.read_text() == b.read_text()


def test_from_report_missing(tmp_path):
    assert run(["verify", "forms", "--from-report", str(tmp_path / "nope.json")], tmp_path)[0] == 2
