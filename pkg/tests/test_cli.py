from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from fds3.cli import run


def _json(capsys, argv, status=0):
    assert run(argv) == status
    return json.loads(capsys.readouterr().out)


def test_symbol_report(capsys):
    out = _json(capsys, ["symbol", "--model", "product", "--f", "z", "--g", "z-2", "--orbit", "0", "--method", "both"])
    assert out["schema_version"] == "1" and out["command"] == "symbol"
    assert {"raw", "reduced", "coefficients", "residual", "verdict", "flag", "direct", "agreement", "seams", "tube"} <= set(out)
    assert out["agreement"]["verdict"] == "pass"
    assert "generated_at" not in out


def test_reciprocity_with_csv(tmp_path, capsys):
    path = tmp_path / "orbits.csv"
    out = _json(capsys, ["reciprocity", "--model", "rotation", "--k", "3", "--f", "z^3", "--g", "z^3-1", "--csv", str(path)])
    assert out["verdict"] == "pass"
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == len(out["orbits"]) and "orbit" in rows[0]


def test_catmap_counts(tmp_path, capsys):
    path = tmp_path / "counts.csv"
    out = _json(capsys, ["orbits", "--model", "catmap", "--n", "4", "--csv", str(path)])
    assert [r["count"] for r in out["counts"]] == [2, 12, 50, 192]
    assert all(r["count"] == r["brute_force"] for r in out["counts"])
    assert [int(r["brute_force"]) for r in csv.DictReader(path.open())] == [2, 12, 50, 192]


def test_output_files_are_deterministic(tmp_path):
    argv = ["symbol", "--model", "product", "--f", "z^2-1", "--g", "z-3", "--orbit", "1"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["-o", str(a)]) == 0
    assert run(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timestamp_is_opt_in(capsys):
    out = _json(capsys, ["examples", "--timestamp"])
    assert "generated_at" in out


@pytest.mark.parametrize("argv", [
    ["symbol", "--model", "product", "--f", "exp(z)", "--g", "z", "--orbit", "0"],
    ["symbol", "--model", "rotation", "--f", "z", "--g", "z^3", "--orbit", "0"],
    ["symbol", "--model", "product", "--f", "z", "--g", "z-0.1", "--orbit", "0"],
    ["orbits", "--model", "catmap", "--matrix", "1,0,0,1"],
])
def test_bad_inputs_exit_2(argv, capsys):
    assert run(argv) == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["symbol", "--model", "nope", "--f", "z", "--g", "z", "--orbit", "0"],
    ["symbol", "--model", "product", "--f", "z", "--g", "z", "--orbit", "0", "--eps", "-1"],
    ["symbol", "--model", "product", "--f", "z", "--g", "z", "--orbit", "0", "--r", "0"],
])
def test_argument_validation(argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 2


def test_verify_selected_suites(capsys):
    out = _json(capsys, ["verify", "--suite", "catmap", "--suite", "lattice"])
    assert out["verdict"] == "pass" and out["summary"]["failed"] == 0


def test_examples_and_model_info(capsys):
    out = _json(capsys, ["examples"])
    assert len(out["examples"]) >= 5
    info = _json(capsys, ["model-info", "--model", "t3_linear", "--samples", "500"])
    assert info["canonical_form"]["passed"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fds3.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "reciprocity" in proc.stdout


@pytest.mark.parametrize("module", ["cech_deligne", "mesh_integration", "fds_examples", "symbols", "cli"])
def test_public_modules_import(module):
    import importlib

    mod = importlib.import_module(f"fds3.{module}")
    for name in getattr(mod, "__all__", []):
        assert hasattr(mod, name)
