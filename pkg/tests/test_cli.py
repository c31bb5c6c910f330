import json

import pytest
from typer.testing import CliRunner

from mopasym.cli import app
from mopasym.config import settings
from mopasym.core.schema import CheckResult, VerifyReport

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, list(args))


@pytest.mark.parametrize(
    "args, expected",
    [
        (["eval", "--family", "kbessel", "--alpha", "0", "--nu", "1", "--n", "1", "--x", "3"], "1"),
        (["eval", "--family", "meijerg", "--nus", "1/2,1/3", "--n", "0", "--x", "7"], "1"),
        (["eval", "--family", "mlag1", "--alphas", "0", "--n", "1", "--x", "0"], "-1"),
        (["eval", "--family", "pineiro", "--alphas", "0", "--n", "1", "--x", "0"], "-1/2"),
    ],
)
def test_eval_exact_values(args, expected):
    result = invoke(*args)
    assert result.exit_code == 0, result.output
    assert result.output.strip() == expected


def test_eval_normalized_adds_a_line():
    result = invoke("eval", "--family", "kbessel", "--alpha", "0", "--nu", "1", "--n", "1", "--x", "3", "--normalized")
    assert result.exit_code == 0
    assert result.output.split() == ["1", "-1/2"]


def test_coeffs_csv():
    result = invoke("coeffs", "--family", "kbessel", "--alpha", "0", "--nu", "1", "--n", "1")
    assert result.exit_code == 0
    assert result.output == "power,coefficient\n0,-2\n1,1\n"


def test_coeffs_json_and_oracle():
    result = invoke("--format", "json", "coeffs", "--family", "angelesco", "--n", "1,1", "--oracle")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["n"] == [1, 1]
    assert payload["coefficients"] == ["-1/3", "0", "1"]


def test_out_writes_a_file(tmp_path):
    target = tmp_path / "coeffs.csv"
    result = invoke("--out", str(target), "coeffs", "--family", "kbessel", "--alpha", "0", "--nu", "1", "--n", "1")
    assert result.exit_code == 0
    assert target.read_text(encoding="utf-8").startswith("power,coefficient")


@pytest.mark.parametrize(
    "args, reason",
    [
        (["eval", "--family", "kbessel", "--alpha=-2", "--n", "1", "--x", "0"], "InvalidParameters"),
        (["eval", "--family", "hermite", "--n", "1", "--x", "0"], "InvalidParameters"),
        (["eval", "--family", "kbessel", "--n", "1", "--x", "abc"], "InvalidParameters"),
        (["eval", "--family", "kbessel", "--n", "1,x", "--x", "0"], "InvalidParameters"),
        (["eval", "--family", "mlag2", "--cs", "1,oops", "--n", "1,1", "--x", "0"], "ValidationError"),
        (["--digits", "10", "eval", "--family", "kbessel", "--n", "1", "--x", "0"], "ConfigError"),
        (["--format", "xml", "info"], "ConfigError"),
        (["zeros", "--genbessel", "--bessel", "--alpha", "0"], "InvalidParameters"),
    ],
)
def test_errors_exit_with_code_two(args, reason):
    result = invoke(*args)
    assert result.exit_code == 2
    assert f"error: {reason}" in result.output


def test_genbessel_zeros():
    result = invoke("zeros", "--genbessel", "--alphas", "0,0", "--count", "3")
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "kind,k,value,tolerance"
    assert len(lines) == 4
    assert all(line.startswith("genbessel,") for line in lines[1:])


def test_bessel_zeros_json():
    result = invoke("--format", "json", "zeros", "--bessel", "--alpha", "1/2", "--count", "2")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["kind"] == "bessel"
    # j_{1/2,k} = k pi
    assert float(payload["values"][0]) == pytest.approx(3.14159265358979, rel=1e-12)


def test_family_zeros():
    result = invoke("zeros", "--family", "pineiro", "--alphas", "0", "--n", "2", "--count", "2")
    assert result.exit_code == 0, result.output
    assert len(result.output.strip().splitlines()) == 3


def test_mh_table_single_experiment():
    result = invoke(
        "--format", "json",
        "mh-table", "--theorem", "6", "--family", "kbessel", "--alpha", "0", "--nu", "1",
        "--n-grid", "4,8,16", "--z-grid", "1/2,1",
    )
    assert result.exit_code == 0, result.output
    reports = json.loads(result.output)
    assert len(reports) == 1
    assert reports[0]["theorem_id"] == 6
    assert reports[0]["n_grid"] == [4, 8, 16]


def test_mh_table_csv_columns():
    result = invoke(
        "mh-table", "--theorem", "8", "--family", "meijerg", "--nus", "1/2,1/3",
        "--n-grid", "4,8,16", "--z-grid", "1",
    )
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "theorem,n,z_sup,sup_error,order_estimate"
    assert [line.split(",")[1] for line in lines[1:]] == ["4", "8", "16"]


def test_bad_n_grid_exits_two():
    result = invoke("mh-table", "--theorem", "6", "--family", "kbessel", "--n-grid", "4,eight")
    assert result.exit_code == 2
    assert "error: InvalidParameters" in result.output


def test_zero_scaling_single_family():
    result = invoke("zero-scaling", "--family", "kbessel", "--alpha", "0", "--nu", "1", "--n-grid", "4,8")
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert lines[0] == "family,k,n,scaled_zero,target,rel_error"
    assert len(lines) == 3


def test_verify_rejects_an_empty_panel(tmp_path):
    config = tmp_path / "panel.json"
    config.write_text(json.dumps({"panel": []}), encoding="utf-8")
    result = invoke("--config", str(config), "verify")
    assert result.exit_code == 2
    assert "error: ConfigError" in result.output



def fake_verification(config, ctx, workers=1):
    return VerifyReport(digits=ctx.digits, checks=[CheckResult(name="dell_limit", passed=True, detail="ok", seconds=0.1)])


def test_verify_writes_the_default_report(tmp_path, monkeypatch):
    target = tmp_path / "verify.json"
    monkeypatch.setattr("mopasym.core.verification.run_verification", fake_verification)
    monkeypatch.setattr(settings, "VERIFY_REPORT", str(target))
    result = invoke("verify")
    assert result.exit_code == 0, result.output
    assert "dell_limit" in result.output and "PASS" in result.output
    payload = json.loads(target.read_text(encoding="utf-8"))
    assert payload["all_passed"] is True
    assert "seconds" not in payload["checks"][0]


def test_verify_out_takes_precedence(tmp_path, monkeypatch):
    target = tmp_path / "out.json"
    monkeypatch.setattr("mopasym.core.verification.run_verification", fake_verification)
    monkeypatch.setattr(settings, "VERIFY_REPORT", str(tmp_path / "unused.json"))
    result = invoke("--out", str(target), "verify")
    assert result.exit_code == 0, result.output
    assert json.loads(target.read_text(encoding="utf-8"))["checks"][0]["name"] == "dell_limit"
    assert not (tmp_path / "unused.json").exists()


@pytest.mark.slow
def test_verify_passes_on_the_default_panel(tmp_path, monkeypatch):
    target = tmp_path / "verify.json"
    monkeypatch.setattr(settings, "VERIFY_REPORT", str(target))
    result = invoke("verify")
    assert result.exit_code == 0, result.output
    assert "FAIL" not in result.output
    assert json.loads(target.read_text(encoding="utf-8"))["all_passed"] is True


def test_info_and_version():
    info = invoke("info")
    assert info.exit_code == 0
    assert "mopasym - Configuration" in info.output
    assert "Digits:" in info.output
    version = invoke("version")
    assert version.exit_code == 0
    assert version.output.startswith("mopasym v")
