"""End-to-end CLI runs against temp configs and artifact checks."""

import hashlib
import json
import os

import pytest

from condenser import cli

PASSING_CONFIG = """\
[domain]
kind = "halfspace"
alpha = 2.0

[plates]
levels = 2
nodes_a1 = 240
nodes_a2 = 600

[output]
directory = "{out}"
"""


@pytest.fixture(scope="module")
def solve_run(tmp_path_factory):
    """One full solve kept around for the artifact assertions."""
    root = tmp_path_factory.mktemp("cli_solve")
    out = root / "out"
    cfg = root / "run.toml"
    cfg.write_text(PASSING_CONFIG.format(out=out))
    code = cli.main(["solve", "--config", str(cfg), "--seed", "1", "--quiet"])
    return code, cfg, out


def test_solve_exits_zero(solve_run):
    code, _, _ = solve_run
    assert code == 0


def test_solve_writes_artifacts(solve_run):
    _, _, out = solve_run
    for name in ("solution.csv", "diagnostics.json", "manifest.json",
                 "solution.png", "potentials.png"):
        path = out / name
        assert path.is_file() and path.stat().st_size > 0, name


def test_diagnostics_json_reports_pass(solve_run):
    _, _, out = solve_run
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["all_passed"] is True
    for block in ("frostman", "zone", "duality", "support"):
        assert block in diag


def test_manifest_records_config_hash(solve_run):
    _, cfg, out = solve_run
    manifest = json.loads((out / "manifest.json").read_text())
    digest = hashlib.sha256(cfg.read_bytes()).hexdigest()
    assert manifest["config_sha256"] == digest
    assert manifest["seed"] == 1
    assert "numpy" in manifest["versions"]


def test_rerun_reproduces_csv_bit_for_bit(solve_run, tmp_path):
    _, cfg, out = solve_run
    out2 = tmp_path / "out2"
    code = cli.main(["solve", "--config", str(cfg), "--seed", "1",
                     "--out", str(out2), "--quiet"])
    assert code == 0
    assert (out / "solution.csv").read_bytes() \
        == (out2 / "solution.csv").read_bytes()


def test_quiet_suppresses_stdout(solve_run, tmp_path, capsys):
    _, cfg, _ = solve_run
    cli.main(["solve", "--config", str(cfg), "--seed", "1",
              "--out", str(tmp_path / "q"), "--quiet"])
    assert capsys.readouterr().out == ""


def test_diagnostic_failure_exit_code(solve_run, tmp_path, monkeypatch):
    _, cfg, _ = solve_run
    monkeypatch.setattr(cli, "run_diagnostics",
                        lambda sol, p: {"all_passed": False})
    code = cli.main(["solve", "--config", str(cfg), "--seed", "1",
                     "--out", str(tmp_path / "f"), "--quiet"])
    assert code == 4


# ---------------------------------------------------------------------------
# config validation -> exit 2
# ---------------------------------------------------------------------------

def _run_config(tmp_path, text):
    cfg = tmp_path / "bad.toml"
    cfg.write_text(text)
    return cli.main(["solve", "--config", str(cfg), "--quiet"])


def test_missing_config_file(tmp_path):
    assert cli.main(["solve", "--config", str(tmp_path / "nope.toml"),
                     "--quiet"]) == 2


@pytest.mark.parametrize("text", [
    '[domain]\nkind = "torus"\n',
    '[domain]\nkind = "ball"\nalpha = 2.5\n',
    '[domain]\nkind = "ball"\nbogus = 1\n',
    '[domain]\nkind = "ball"\n\n[constraint]\nq = 0.5\n',
    '[domain]\nkind = "ball"\n\n[output]\nformats = ["pdf"]\n',
    '[domain]\nkind = "halfspace"\nalpha = 1.5\n',
    '[domain\nkind = "ball"\n',
])
def test_config_errors_exit_two(tmp_path, text):
    assert _run_config(tmp_path, text) == 2


# ---------------------------------------------------------------------------
# other subcommands
# ---------------------------------------------------------------------------

def test_capacity_command(capsys):
    assert cli.main(["capacity", "--nodes", "300"]) == 0
    assert "capacity(1.0)" in capsys.readouterr().out


def test_balayage_point(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(PASSING_CONFIG.format(out=tmp_path / "out"))
    code = cli.main(["balayage", "--config", str(cfg), "--seed", "1",
                     "--point", "0.8,0.2,-0.1", "--quiet"])
    assert code == 0
    assert (tmp_path / "out" / "swept.csv").is_file()
    report = json.loads((tmp_path / "out" / "balayage.json").read_text())
    assert report["mass_error"] <= 0.02


def test_balayage_point_outside_domain(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(PASSING_CONFIG.format(out=tmp_path / "out"))
    code = cli.main(["balayage", "--config", str(cfg), "--seed", "1",
                     "--point=-0.8,0.2,-0.1", "--quiet"])
    assert code == 3


def test_experiment_counterexample(tmp_path):
    code = cli.main(["experiment", "counterexample", "--terms", "4",
                     "--out", str(tmp_path), "--quiet"])
    assert code == 0
    report = json.loads((tmp_path / "counterexample.json").read_text())
    assert report["passed"] is True
    assert (tmp_path / "counterexample.png").is_file()


def test_experiment_short_circuit(tmp_path):
    code = cli.main(["experiment", "short-circuit", "--levels", "2",
                     "--out", str(tmp_path), "--quiet"])
    assert code == 0
    report = json.loads((tmp_path / "short-circuit.json").read_text())
    assert report["passed"] is True
    assert (tmp_path / "short-circuit.png").is_file()


def test_calibrate_beta(tmp_path, capsys):
    code = cli.main(["calibrate-beta", "--nodes", "200", "--grid", "3",
                     "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "calibrate_beta.json").read_text())
    assert len(report["grid"]) == 3
    assert report["best"]["beta"] in [r["beta"] for r in report["grid"]]
    assert "best beta" in capsys.readouterr().out
