"""End-to-end tests of the command-line interface.

Every test shells out to ``python -m pwextremal`` so argument parsing,
exit codes, and the stdout/stderr split are exercised exactly as a user
sees them.
"""

import json
import shutil
import subprocess
import sys

import pytest
from mpmath import mp, mpf

from refvals import C_REF, H0_REF, L1_REF


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "pwextremal"] + list(argv),
        capture_output=True,
        text=True,
        timeout=600,
    )


def test_constants_payload():
    proc = run_cli("constants", "--digits", "12")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["C"] == "0.540928821901"
    assert payload["L1"].startswith("-0.45195216488")
    assert payload["digits_certified"] == 12


def test_constants_fifty_digit_prefixes():
    proc = run_cli("constants", "--digits", "50")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["C"] == C_REF[: 50 + 2]
    assert payload["L1"] == L1_REF[: 50 + 3]


def test_rerun_is_byte_identical():
    first = run_cli("constants", "--digits", "12")
    second = run_cli("constants", "--digits", "12")
    assert first.stdout == second.stdout
    assert first.returncode == second.returncode == 0


def test_manifest_goes_to_stderr():
    proc = run_cli("constants", "--digits", "12")
    manifest = json.loads(proc.stderr.strip().splitlines()[-1])
    assert manifest["command"] == "constants"
    assert manifest["parameters"]["digits"] == 12
    assert manifest["outputs"] == []
    assert "timestamp" in manifest
    # the payload itself must carry no timestamp, or reruns would differ
    assert "timestamp" not in proc.stdout


def test_digits_floor_is_a_usage_error():
    assert run_cli("constants", "--digits", "9").returncode == 2


def test_unknown_export_target_rejected():
    assert run_cli("export", "nonsense").returncode == 2


def test_unknown_suite_rejected():
    assert run_cli("verify", "--suite", "nonsense").returncode == 2


def test_zeros_table():
    proc = run_cli("zeros", "--count", "8", "--digits", "20")
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == "n,tau_n,method"
    assert len(lines) == 9
    previous = mpf(0)
    for n, line in enumerate(lines[1:], start=1):
        fields = line.split(",")
        assert int(fields[0]) == n
        value = mpf(fields[1])
        assert n < value < n + mpf("0.5")
        assert value > previous
        previous = value
        assert fields[2] in ("newton", "series")
    rerun = run_cli("zeros", "--count", "8", "--digits", "20")
    assert rerun.stdout == proc.stdout


def test_zeros_switch_to_series_tail():
    proc = run_cli("zeros", "--count", "40", "--digits", "12")
    methods = {line.split(",")[2] for line in proc.stdout.splitlines()[1:]}
    assert methods == {"newton", "series"}


def test_verify_quadratic_passes():
    proc = run_cli("verify", "--suite", "quadratic", "--digits", "12")
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    assert report["suite"] == "quadratic"
    assert report["passed"] is True
    assert all(c["status"] == "pass" for c in report["checks"])


def test_verify_exit_code_reflects_failure():
    # an absurd threshold forces a fail status and a nonzero exit
    proc = run_cli(
        "verify", "--suite", "quadratic", "--digits", "12",
        "--tolerance-exponent", "60",
    )
    assert proc.returncode == 1
    report = json.loads(proc.stdout)
    assert report["failed"] > 0


def test_verify_conjectures_report_only():
    proc = run_cli(
        "verify", "--suite", "conjectures", "--digits", "12", "--terms", "40"
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    for check in report["checks"]:
        assert check["status"] == "report-only"


def test_out_writes_payload_and_manifest(tmp_path):
    target = tmp_path / "constants.json"
    proc = run_cli("constants", "--digits", "12", "--out", str(target))
    assert proc.returncode == 0
    assert proc.stdout == ""
    payload = json.loads(target.read_text())
    assert payload["C"] == "0.540928821901"
    manifest = json.loads((tmp_path / "constants.json.manifest.json").read_text())
    assert manifest["command"] == "constants"
    assert manifest["outputs"] == [str(target)]


def test_export_rho_coefficients():
    proc = run_cli("export", "rho", "--terms", "6", "--digits", "15")
    payload = json.loads(proc.stdout)
    assert payload["series"] == "rho"
    assert payload["coeffs"][0] == "0.0"
    assert payload["coeffs"][1].startswith("0.0846549979")
    assert payload["coeffs"][2] == "0.0"
    assert payload["coeffs"][3].startswith("0.0056342784")


def test_export_taylor_phi():
    proc = run_cli("export", "taylor-phi", "--terms", "5", "--digits", "15")
    payload = json.loads(proc.stdout)
    assert payload["coeffs"][0].startswith("1.0")
    assert payload["coeffs"][1] == "0.0"
    assert payload["coeffs"][2].startswith("-0.97789580")
    assert len(payload["coeffs"]) == 6


def test_export_factor_taylor_starts_with_slope():
    proc = run_cli("export", "taylor-Phi", "--terms", "4", "--digits", "15")
    payload = json.loads(proc.stdout)
    assert payload["coeffs"][0].startswith("1.0")
    assert payload["coeffs"][1].startswith("-0.4519521648")


def test_export_h_basis_values():
    proc = run_cli("export", "h", "--terms", "12", "--digits", "20")
    payload = json.loads(proc.stdout)
    assert payload["basis"] == "h"
    # (1-u)^n basis: u=1 leaves only the unused constant slot, so h(1) = 0
    assert payload["coeffs"][0] == "0.0"
    with mp.workdps(30):
        total = sum(mpf(c) for c in payload["coeffs"])
        assert abs(total - mpf(H0_REF)) < mpf("1e-13")


def test_export_legendre_even_support():
    proc = run_cli(
        "export", "legendre", "--terms", "6", "--digits", "12", "--format", "csv"
    )
    lines = proc.stdout.splitlines()
    assert lines[0] == "n,coefficient"
    rows = [line.split(",") for line in lines[1:]]
    assert rows[0][1].startswith("1.0")
    assert rows[1][1] == "0.0"
    assert rows[2][1].startswith("-1.013")
    assert len(rows) == 7


def test_export_lvalues_csv():
    proc = run_cli(
        "export", "lvalues", "--terms", "2", "--digits", "15", "--format", "csv"
    )
    lines = proc.stdout.splitlines()
    assert lines[0] == "kind,s,is_pole,value,residue,error_bound"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 4
    table = {(r[0], r[1]): r for r in rows}
    assert table[("plus", "1")][2] == "True"
    assert table[("plus", "1")][4] == "1.0"
    assert table[("minus", "1")][3].startswith("-0.4519521648")


def test_pwx_entry_point():
    exe = shutil.which("pwx")
    if exe is None:
        pytest.skip("pwx script not on PATH")
    proc = subprocess.run(
        [exe, "constants", "--digits", "10"],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["C"] == "0.5409288219"
