from __future__ import annotations

import json
import subprocess
import sys

import pytest

from foxartin.cli import main


def run(args, tmp_path):
    return main([*args, "--out", str(tmp_path / "out")])


def test_build_arc_writes_outputs(tmp_path, capsys):
    assert run(["build-arc"], tmp_path) == 0
    out = tmp_path / "out"
    assert {p.name for p in out.iterdir()} == {"arc.csv", "delta.obj", "conditions.json"}
    doc = json.loads((out / "conditions.json").read_text())
    assert doc["all_pass"] and doc["config"]["samples_per_arc"] == 64
    assert "out" not in doc["config"]
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize("kind", ["chord", "offplane"])
def test_negative_control_exits_with_failure(kind, tmp_path):
    assert run(["build-arc", "--negative-control", kind], tmp_path) == 2


def test_fixed_points_and_flow_field(tmp_path):
    assert run(["fixed-points"], tmp_path) == 0
    assert run(["flow-field", "--grid", "5"], tmp_path) == 0
    doc = json.loads((tmp_path / "out" / "fixed_points.json").read_text())
    assert doc["census"] == {"SADDLE": 1, "SINK": 1}
    # computed roles are reported as computed; the published ones ride along
    assert doc["roles_match_published"] is False
    assert {f["name"]: f["type"] for f in doc["fixed_points"]} == {"x1=-1": "SINK", "x1=+1": "SADDLE"}


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"flow-field": {"grid": 3, "dim": 4}}))
    assert main(["flow-field", "--config", str(cfg), "--grid", "5", "--out", str(tmp_path / "o")]) == 0
    doc = (tmp_path / "o" / "flow_field.csv").read_text()
    assert '"grid": 5' in doc and '"dim": 4' in doc


@pytest.mark.parametrize("body", ['{"orbit": {"bogus": 1}}', "{", '{"orbit": 3}'])
def test_bad_config_exits_4(body, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(body)
    assert main(["orbit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4


def test_bad_values_exit_4(tmp_path):
    assert run(["orbit", "--dt", "-1"], tmp_path) == 4
    assert run(["fixed-points", "--dim", "7"], tmp_path) == 4
    assert run(["orbit", "--seed", "-3"], tmp_path) == 4


def test_missing_config_exits_3(tmp_path):
    assert main(["orbit", "--config", str(tmp_path / "none.json")]) == 3


def test_unwritable_output_exits_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["fixed-points", "--out", str(blocker / "sub")]) == 3


def test_orbit_rerun_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["orbit", "--seed", "7", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "orbit.csv").read_bytes() == (tmp_path / "b" / "orbit.csv").read_bytes()


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "foxartin.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout
