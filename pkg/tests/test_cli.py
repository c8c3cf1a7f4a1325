import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from exacthydro.cli import RunConfig, UsageError, run
from exacthydro.invariance import simple_exact
from exacthydro.viscosity import r_maxwell


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    lines = [ln for ln in text.splitlines() if ln]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_models_list(capsys):
    code, out, _ = _run(capsys, "models", "list")
    assert code == 0
    names = [r["name"] for r in _csv(out)]
    assert names == ["grad3_1d", "grad13_1d", "grad13_lateral"]


def test_ce(capsys):
    code, out, _ = _run(capsys, "ce", "--order", "3")
    rows = _csv(out)
    assert code == 0 and rows[2]["a_n"] == "92/27" and rows[3]["b_n"] == "1076/81"


def test_manifold_values(capsys):
    code, out, _ = _run(capsys, "manifold", "--k-max", "1", "--points", "3")
    rows = _csv(out)
    assert code == 0 and len(rows) == 3
    assert float(rows[2]["A"]) == simple_exact(1.0)["A"]


def test_manifold_csv_json_roundtrip(capsys):
    _, text_csv, _ = _run(capsys, "manifold", "--k-max", "2", "--points", "5")
    _, text_json, _ = _run(capsys, "manifold", "--k-max", "2", "--points", "5", "--format", "json")
    data = json.loads(text_json)
    rows = _csv(text_csv)
    assert data["columns"] == list(rows[0].keys())
    for r, j in zip(rows, data["rows"]):
        assert [float(v) for v in r.values()] == [float(v) for v in j]


def test_deterministic(capsys):
    a = _run(capsys, "dispersion", "--model", "grad13_1d", "--closure", "kinetic", "--k-max", "2", "--points", "7")
    b = _run(capsys, "dispersion", "--model", "grad13_1d", "--closure", "kinetic", "--k-max", "2", "--points", "7")
    assert a == b and a[0] == 0


def test_dispersion_columns(capsys):
    code, out, _ = _run(capsys, "dispersion", "--k-max", "1", "--points", "2")
    rows = _csv(out)
    assert list(rows[0]) == ["k", "branch_id", "label", "re_omega", "im_omega"]
    assert {r["label"] for r in rows} == {"hydrodynamic"}


def test_grad13_critical_range_footer(capsys):
    code, out, _ = _run(capsys, "manifold", "--model", "grad13_1d", "--k-min", "0.26", "--k-max", "0.31", "--points", "6")
    assert code == 0
    crit = [ln for ln in out.splitlines() if ln.startswith("critical_k")]
    assert crit and abs(float(crit[0].split(",")[1]) - 0.3021) < 1e-3


def test_grad13_explicit_beyond_critical(capsys):
    code, _, err = _run(capsys, "manifold", "--model", "grad13_1d", "--k-values", "0.35")
    assert code == 3 and "critical" in err


def test_viscosity(capsys):
    code, out, _ = _run(capsys, "viscosity", "--points", "3")
    rows = _csv(out)
    assert code == 0 and float(rows[1]["R"]) == r_maxwell(4.0)
    code, out, _ = _run(capsys, "viscosity", "--gamma", "0.5", "--g-min", "0", "--g-max", "1", "--points", "3")
    assert code == 0 and float(_csv(out)[0]["R"]) == pytest.approx(4 / 3)


@pytest.mark.parametrize("check", ["defect", "energy", "diagram"])
def test_verify_pass(capsys, check):
    code, out, _ = _run(capsys, "verify", check, "--k", "0.5")
    assert code == 0
    assert max(float(r["value"]) for r in _csv(out)) < 1e-9


def test_verify_projector(capsys):
    code, out, _ = _run(capsys, "verify", "projector", "--trials", "50", "--seed", "3")
    assert code == 0


def test_verify_threshold_violation(capsys):
    code, _, err = _run(capsys, "verify", "defect", "--closure", "matched", "--k", "0.1")
    assert code == 4 and "threshold" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["manifold", "--model", "nope"],
    ["manifold", "--points", "0"],
    ["viscosity", "--gamma", "0.2", "--method", "ode"],
    ["verify", "defect", "--macro", "1,2,3"],
])
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and err


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = _run(capsys, "ce", "--order", "2", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("n,a_n")
    assert "\r" not in path.read_text()


def test_config_validation():
    with pytest.raises(UsageError):
        RunConfig(subcommand="manifold", k_min=2.0, k_max=1.0)


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "exacthydro", "ce", "--order", "1"], capture_output=True, text=True
    )
    assert res.returncode == 0 and res.stdout.splitlines()[1].startswith("0,-4/3")
