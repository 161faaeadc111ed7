import json
import subprocess
import sys

import pytest

from e7cylg.cli import CATEGORIES, run
from e7cylg.store import read_fixture


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    return code, json.loads(out)


def test_check_wdvv_entry(capsys):
    code, out = _json(capsys, "check", "wdvv", "--potential", "e7g1", "--order", "8")
    assert code == 0 and out["status"] == "pass"


def test_check_cylg_g2_permutation(capsys):
    code, out = _json(capsys, "check", "cylg", "--group", "g2", "--order", "8")
    assert code == 0
    assert out["permutation"] == "(X3, X4, X2)"


def test_tampered_potential_file(capsys, tmp_path):
    code, dump = _json(capsys, "dump", "potential", "e7g1", "--order", "6")
    assert code == 0
    terms = dump["potential"]["terms"]
    victim = next(t for t in terms if "t_aJ" in t["monomial"] and "t_c_xy" in t["monomial"])
    victim["series"]["coeffs"][0]["val"][0] = "7"
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(dump))
    code, out = _json(capsys, "check", "wdvv", "--potential", str(path), "--order", "6")
    assert code == 1
    assert out["failures"] and len(out["failures"][0]["quadruple"]) == 4


def test_tampered_fixture_fails_report(capsys, tmp_path):
    (tmp_path / "halphen").mkdir()
    data = read_fixture("halphen", "x_tau0_omega0")
    data["X2"]["coeffs"][2]["val"][0] = "1/63"
    (tmp_path / "halphen" / "x_tau0_omega0.json").write_text(json.dumps(data))
    code, out = _json(capsys, "check", "halphen", "--triple", "fixture", "--fixtures", str(tmp_path))
    assert code == 1
    code, out = _json(capsys, "report", "--order", "4", "--fixtures", str(tmp_path),
                      "--skip", "reconstruct,numeric,wdvv")
    assert code == 1 and not out["passed"]
    failed = {c["name"] for c in out["checks"] if c["status"] == "fail"}
    assert failed == {"fixture:x_tau0_omega0", "halphen:fixture"}


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["check", "wdvv", "--potential", "no_such_entry"],
    ["check", "cylg", "--group", "g7"],
    ["report", "--skip", "everything"],
    ["dump", "potential", "e7g1", "--order", "2"],
    ["gen", "series", "--which", "theta9"],
    ["check", "wdvv", "--potential", "e7g1", "--order", "-3"],
])
def test_usage_errors(capsys, argv):
    assert run(argv) == 2


def test_gen_series(capsys):
    code, out = _json(capsys, "gen", "series", "--which", "theta3", "--order", "3")
    assert code == 0 and out["variable"] == "q"
    assert out["series"]["coeffs"][0]["val"][0] == "1"
    code, out = _json(capsys, "gen", "series", "--which", "X2", "--order", "3")
    assert out["variable"] == "t" and out["series"]["coeffs"][0]["val"][0] == "1/4"


def test_markdown(capsys):
    code, out = _run(capsys, "check", "ansatz", "--group", "g3", "--format", "md")
    assert code == 0 and "| ansatz:g3 | pass |" in out


def test_reconstruct_with_bad_seed(capsys, tmp_path):
    path = tmp_path / "seed.json"
    path.write_text(json.dumps({"values": {"h1[t^0]": ["1/64", "0", "0", "0"]}}))
    code, out = _json(capsys, "reconstruct", "--group", "g2", "--order", "4", "--seed", str(path))
    assert code == 1
    assert out["solutions"][0]["error"] == "Inconsistent"


def test_reconstruct_command(capsys):
    code, out = _json(capsys, "reconstruct", "--group", "g2", "--order", "6")
    assert code == 0 and out["seeds"] == 2
    assert {s["catalog"]["entry"] for s in out["solutions"]} == {"e7g2_minus", "e7g2_plus"}


def test_report_quick_is_deterministic(capsys):
    first = _run(capsys, "report", "--order", "4")
    second = _run(capsys, "report", "--order", "4", "--jobs", "2")
    assert first[0] == 0 and first == second
    out = json.loads(first[1])
    assert out["passed"] and "seconds" not in out
    assert {c["name"].split(":")[0] for c in out["checks"]} >= {"wdvv", "cylg", "reconstruct", "numeric"}


def test_report_skip_numeric(capsys):
    code, out = _json(capsys, "report", "--order", "4", "--skip", "numeric", "--skip", "reconstruct")
    assert code == 0 and out["skipped"] == ["numeric", "reconstruct"]
    assert not any(c["name"].startswith(("numeric", "reconstruct")) for c in out["checks"])
    cylg_g3 = next(c for c in out["checks"] if c["name"] == "cylg:g3")
    assert "numeric" not in cylg_g3


def test_categories():
    assert set(CATEGORIES) == {"fixture", "qmodular", "halphen", "wdvv", "cylg", "reconstruct",
                               "irrationality", "ansatz", "numeric"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "e7cylg", "check", "ansatz", "--group", "g1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"
