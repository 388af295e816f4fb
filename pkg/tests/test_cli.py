import argparse
import json

import pytest

from mertens.cli import exact_int, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_exact_int_parsing():
    assert exact_int("1000000") == 10 ** 6
    assert exact_int("1e6") == 10 ** 6
    assert exact_int("1.3e9") == 1_300_000_000
    assert exact_int("2_160_535") == 2_160_535
    with pytest.raises(argparse.ArgumentTypeError):
        exact_int("1.23e1")
    with pytest.raises(Exception):
        exact_int("twelve")


def test_constants_command(capsys):
    code, out = run(capsys, "constants")
    assert code == 0
    assert "# mertens-cli v1" in out and "# ledger" in out
    assert "zeta(1/2)" in out and "L*" in out


def test_compute_mertens_table(capsys):
    code, out = run(capsys, "compute", "M", "1e4", "--stride", "2000")
    assert code == 0
    rows = [l for l in out.splitlines() if l.strip().startswith(("2000", "10000"))]
    assert any(l.split()[1] == l.split()[2] for l in rows)  # exact integers


def test_compute_psi_contains_reference(capsys):
    code, out = run(capsys, "--format", "json", "compute", "psi", "10")
    assert code == 0
    doc = json.loads(out)
    (row,) = doc["rows"]
    assert abs(row["hi"] - 7.8320) <= 1e-4  # printed value, one-unit rule
    assert row["hi"] - row["lo"] < 1e-12
    assert doc["version"] == "mertens-cli v1" and doc["pass"]


def test_compute_m1_sign(capsys):
    code, out = run(capsys, "--format", "json", "compute", "m1", "1e5")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert row["hi"] - row["lo"] < 1e-10


def test_verify_identity_pass_and_requirements(capsys):
    code, out = run(capsys, "verify", "identity", "--x", "10000", "--y", "100")
    assert code == 0 and "contains 0" in out
    assert main(["verify", "identity"]) == 2  # missing --x


def test_verify_model_pass_and_fail(capsys):
    code, out = run(capsys, "verify", "model", "M", "--from", "33",
                    "--to", "10000")
    assert code == 0 and "x = 199" in out
    code, out = run(capsys, "verify", "model", "M", "--from", "1", "--to", "32")
    assert code == 1  # |M(1)| = 1 exceeds 0.571 * sqrt(1)
    assert "violation at x = 1" in out


def test_certify_dyadic_table(capsys):
    code, out = run(capsys, "certify", "dyadic")
    assert code == 0
    assert out.count("oui") == 9 and "NON" not in out


def test_certify_large_x(capsys):
    code, out = run(capsys, "certify", "large-x")
    assert code == 0
    assert "L=L*" in out and "1/11035" in out


def test_certify_theorem_a_with_injected_inputs(capsys):
    code, out = run(capsys, "--format", "json", "certify", "theorem-a",
                    "--m1", "1.1941642e-06,1.1941755e-06",
                    "--mu2", "12158.5402,12158.5404")
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"]
    assert any("x/160383" in n for n in doc["notes"])
    assert any("x/180194" in n for n in doc["notes"])
    assert doc["certificates"]  # auditable trace documents present


def test_scan_threshold_csv(capsys, tmp_path):
    ck = tmp_path / "thr.ckpt"
    code, out = run(capsys, "--format", "csv", "scan-threshold", "160383",
                    "1e5", "--checkpoint", str(ck))
    assert code == 0
    lines = out.splitlines()
    assert lines[3] == "x,lo,hi,pass"  # fixed, documented schema
    assert lines[4].startswith("100000,")
    # bitwise resume through the CLI
    code2, out2 = run(capsys, "--format", "csv", "scan-threshold", "160383",
                      "1e5", "--checkpoint", str(ck))
    assert out2 == out


def test_scan_threshold_trivial_bound(capsys):
    code, out = run(capsys, "scan-threshold", "1", "1e4")
    assert code == 0  # no row emitted, nothing failed
    assert "no x <=" in out


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code = main(["--format", "json", "--output", str(target), "constants"])
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["command"] == "constants"


def test_ledger_file_flag(capsys, tmp_path):
    from mertens.hypotheses import default_ledger
    path = tmp_path / "ledger.txt"
    path.write_text(default_ledger().dump())
    code, out = run(capsys, "--ledger", str(path), "constants")
    assert code == 0
    assert default_ledger().digest() in out
