"""Command-line interface: outputs, exit codes, determinism, config file."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from qtoda.cli import main

RUN = [sys.executable, "-m", "qtoda.cli"]


def run_cli(args):
    return subprocess.run(RUN + args, capture_output=True, text=True)


def strip_timestamp_json(text: str) -> str:
    return "\n".join(
        line for line in text.splitlines() if '"generated_at"' not in line
    )


def test_schur_command_prints_polynomial(capsys):
    assert main(["schur", "--mu", "[2,1]"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == "1/3*p1^3 - 1/3*p3"


def test_skew_schur_command(capsys):
    assert main(["schur", "--mu", "[2]", "--nu", "[1]"]) == 0
    assert capsys.readouterr().out.strip() == "p1"


def test_vertex_command_difference_zero(capsys):
    assert main(["vertex", "--nu", "[2]", "--nubar", "[1]"]) == 0
    out = capsys.readouterr().out
    assert "difference:    0" in out


def test_vertex_empty_prints_one(capsys):
    assert main(["vertex", "--nu", "[]", "--nubar", "[]"]) == 0
    out = capsys.readouterr().out
    assert "defining form: 1" in out


def test_tau_degree_zero_single_entry(tmp_path):
    out = tmp_path / "tau.json"
    assert main(["tau", "--a", "1", "--b", "1", "--deg", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1
    assert list(doc["entries"]) == ["[]|[]"]
    assert doc["entries"]["[]|[]"] == "1"


def test_tau_rejects_noncoprime(capsys):
    assert main(["tau", "--a", "2", "--b", "4", "--deg", "1"]) == 2


def test_identities_small_pass(tmp_path):
    out = tmp_path / "id.json"
    assert main([
        "identities", "--weight", "2", "--weight-sym", "2", "--weight-schur", "2",
        "--out", str(out),
    ]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert all(c["passed"] for c in doc["checks"])


def test_identities_weight_zero_vacuous_pass(tmp_path):
    out = tmp_path / "id0.json"
    assert main([
        "identities", "--weight", "0", "--weight-sym", "0", "--weight-schur", "0",
        "--out", str(out),
    ]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True


def test_identities_corrupted_build_fails(tmp_path):
    out = tmp_path / "id.json"
    code = main([
        "identities", "--weight", "2", "--weight-sym", "1", "--weight-schur", "1",
        "--self-test-corrupt", "--out", str(out),
    ])
    assert code == 1
    doc = json.loads(out.read_text())
    bad = [c for c in doc["checks"] if not c["passed"]]
    assert bad and bad[0]["detail"]  # counterexample recorded


def test_laxcheck_small(tmp_path):
    out = tmp_path / "lax.json"
    assert main(["laxcheck", "--a", "1", "--b", "1", "--T", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    names = {c["name"] for c in doc["checks"]}
    assert "fractional_powers_cancel" in names
    assert "integerized_power_identity" in names


def test_laxcheck_exit_code_on_noncoprime():
    assert main(["laxcheck", "--a", "2", "--b", "2", "--T", "2"]) == 2


def test_simulate_zero_amplitude_constant_csv(tmp_path):
    csv = tmp_path / "run.csv"
    out = tmp_path / "run.json"
    code = main([
        "simulate", "--a", "1", "--b", "1", "--sites", "4", "--dt", "1e-2",
        "--t-end", "0.1", "--amplitude", "0", "--record-every", "2",
        "--out-csv", str(csv), "--out", str(out),
    ])
    assert code == 0
    lines = csv.read_text().splitlines()
    assert lines[0].startswith("# generated_at=")
    header = lines[1].split(",")
    assert header[0] == "time" and header[1] == "u_0" and header[-1] == "H_3"
    first = lines[2].split(",")[1:9]
    last = lines[-1].split(",")[1:9]
    assert first == last  # constant data stays constant
    doc = json.loads(out.read_text())
    assert doc["max_relative_drift"] < 1e-12


def test_simulate_determinism_modulo_timestamp(tmp_path):
    args = [
        "simulate", "--a", "1", "--b", "1", "--sites", "4", "--dt", "1e-2",
        "--t-end", "0.05", "--record-every", "1",
    ]
    out1, csv1 = tmp_path / "a.json", tmp_path / "a.csv"
    out2, csv2 = tmp_path / "b.json", tmp_path / "b.csv"
    assert main(args + ["--out", str(out1), "--out-csv", str(csv1)]) == 0
    assert main(args + ["--out", str(out2), "--out-csv", str(csv2)]) == 0
    strip1 = strip_timestamp_json(out1.read_text()).replace(str(csv1), "CSV")
    strip2 = strip_timestamp_json(out2.read_text()).replace(str(csv2), "CSV")
    assert strip1 == strip2
    body1 = csv1.read_text().splitlines()[1:]
    body2 = csv2.read_text().splitlines()[1:]
    assert body1 == body2


def test_tau_determinism_modulo_timestamp(tmp_path):
    out1, out2 = tmp_path / "t1.json", tmp_path / "t2.json"
    for path in (out1, out2):
        assert main(["tau", "--a", "1", "--b", "2", "--deg", "2", "--out", str(path)]) == 0
    assert strip_timestamp_json(out1.read_text()) == strip_timestamp_json(out2.read_text())


def test_config_file_defaults_and_override(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[schur]\nmu = [1,1]\n")
    out = tmp_path / "s.json"
    # config supplies --mu; command line overrides with --json output
    assert main(["--config", str(cfg), "schur", "--out", str(out), "--json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["mu"] == "[1,1]"
    assert "p2" in doc["polynomial"]
    # command line wins over the config value
    assert main(["--config", str(cfg), "schur", "--mu", "[1]", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["mu"] == "[1]"


def test_console_entry_point():
    proc = run_cli(["--version"])
    assert proc.returncode == 0
    assert "qtoda" in proc.stdout
