import json
import subprocess
import sys

import pytest

from hessegkz import cli, curves


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_wronskian(capsys):
    code, out, _ = run(capsys, "eval", "W", "psi=0.5")
    assert code == 0
    assert json.loads(out)["value"]["re"] == pytest.approx(0.25 / 0.875)


def test_eval_series_value(capsys):
    code, out, _ = run(capsys, "eval", "I", "psi=0.3")
    d = json.loads(out)
    assert code == 0 and d["metadata"]["method"] == "series"
    assert d["error_estimate"] < 1e-12


def test_eval_u_nu(capsys):
    code, out, _ = run(capsys, "eval", "U_nu", "a=2", "nu=3")
    assert code == 0 and json.loads(out)["value"]["re"] == 14


def test_eval_errors(capsys):
    assert run(capsys, "eval", "nope")[0] == 2
    assert run(capsys, "eval", "W")[0] == 2
    assert run(capsys, "eval", "W", "psi=1")[0] == 1


def test_emit_b3(capsys):
    code, out, _ = run(capsys, "emit", "B3", "csv", "4")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "log_power,exponent,numerator,denominator"
    assert [int(l.split(",")[2]) for l in lines[1:]] == [1, -9, 27, -9, -117]


def test_emit_pi1_json(capsys):
    code, out, _ = run(capsys, "series", "pi1", "json", "7")
    d = json.loads(out)
    terms = {t["exponent"]: (t["numerator"], t["denominator"]) for t in d["terms"]}
    assert terms["4"] == ("1", "6") and terms["7"] == ("4", "45")


def test_emit_unknown(capsys):
    assert run(capsys, "emit", "nope", "csv", "3")[0] == 2


def test_operator_listing(capsys):
    code, out, _ = run(capsys, "operator", "--list")
    assert code == 0 and "L_PF" in out.split()


def test_operator_parse(capsys):
    code, out, _ = run(capsys, "operator", "--parse", "theta^2 - z*theta", "--vars", "z")
    assert code == 0 and "theta" in out


def test_verify_filter_and_exit_codes(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _, err = run(capsys, "verify", "--filter", "opalg.*", "-o", str(out_file))
    assert code == 0
    d = json.loads(out_file.read_text())
    assert {r["check"] for r in d["suite"]} >= {"opalg.factorization"}
    assert "runtime" not in d["suite"][0]
    assert run(capsys, "verify", "--filter", "nope")[0] == 2
    assert run(capsys, "verify", "--filter", "opalg.*", "--set", "no_such_key=1")[0] == 2


def test_verify_flagged_is_not_failure(capsys):
    code, out, _ = run(capsys, "verify", "--filter", "frobenius.inhomogeneity")
    assert code == 0
    assert json.loads(out)["suite"][0]["status"] == "flagged"


def test_verify_reports_are_byte_identical():
    cmd = [sys.executable, "-m", "hessegkz.cli", "verify", "--filter", "modular.*"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_chain_command(capsys, tmp_path):
    psi = 0.3
    p = tmp_path / "chain.json"
    p.write_text(curves.standard_chain(psi).to_json())
    code, out, _ = run(capsys, "chain", str(p), "--psi", str(psi))
    assert code == 0
    assert json.loads(out)["value"]["im"] == pytest.approx(0.0955372538, abs=1e-9)
    assert run(capsys, "chain", str(tmp_path / "missing.json"), "--psi", "0.3")[0] == 2
