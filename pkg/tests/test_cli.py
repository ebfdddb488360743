import contextlib
import io
import json
from pathlib import Path

import numpy as np
import pytest

from bottlemode.cli import main

DATA = Path(__file__).parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def printed(stdout):
    return dict(line.split("=", 1) for line in stdout.splitlines() if "=" in line)


def manifest(path):
    doc = json.loads(Path(path).read_text())
    doc.pop("timings_s")
    return doc


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("solve")
    code, stdout, _ = run("solve", "--out", out)
    return code, stdout, out


@pytest.fixture(scope="module")
def coupled(tmp_path_factory):
    out = tmp_path_factory.mktemp("coupling")
    code, stdout, _ = run("coupling", "--out", out, "--sphere")
    return code, stdout, out


@pytest.fixture(scope="module")
def tuned(tmp_path_factory):
    out = tmp_path_factory.mktemp("tuning")
    code, stdout, _ = run("tuning", "--out", out)
    return code, stdout, out


# --- solve ---------------------------------------------------------------

def test_solve_defaults(solved):
    code, stdout, out = solved
    assert code == 0
    assert "m=76" in stdout.splitlines()
    values = printed(stdout)
    for key in ("n_eff", "R0_um", "z_c_turning_um", "z_c_intensity_um", "V_um3",
                "g0_over_2pi_MHz"):
        assert key in values
    assert float(values["R0_um"]) == pytest.approx(8.0, abs=0.05)
    doc = manifest(out / "solve_manifest.json")
    assert doc["tool"] == "bottlemode" and doc["command"] == "solve"
    assert doc["mode"]["m"] == 76
    assert set(doc["mode"]) >= {"k0_per_um", "R0_um", "z_c_intensity_um", "V_um3",
                                "g0_over_2pi_MHz"}


def test_solve_volume_reference_value(solved):
    _, stdout, _ = solved
    assert float(printed(stdout)["V_um3"]) == pytest.approx(690.0, rel=0.05)


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("wavelength = 0.852\nbogus_key = 3\n")
    code, _, err = run("solve", "--config", cfg, "--out", tmp_path)
    assert code == 2
    assert "bogus_key" in err


@pytest.mark.parametrize("text", ["q = -1\n", "wavelength = abc\n", "R_c\n",
                                  "poisson_ratio = 0.7\n"])
def test_invalid_config_values(tmp_path, text):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    assert run("solve", "--config", cfg, "--out", tmp_path)[0] == 2


def test_usage_errors(tmp_path):
    assert run("solve", "--config", tmp_path / "missing.cfg")[0] == 2
    assert run("teleport")[0] == 2
    assert run("field", "--grid", "0x4", "--out", tmp_path)[0] == 2
    assert run("solve", "--jobs", 0, "--out", tmp_path)[0] == 2


def test_solver_failure_exit_code(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("delta_k = 0.05\n")     # R0 * delta_k far outside the adiabatic regime
    code, _, err = run("solve", "--config", cfg, "--out", tmp_path)
    assert code == 1
    assert err.startswith("error:")


def test_manifest_round_trip(solved, tmp_path):
    _, stdout, out = solved
    code, again, _ = run("solve", "--config", out / "solve_manifest.json", "--out", tmp_path)
    assert code == 0
    assert again == stdout
    first, second = manifest(out / "solve_manifest.json"), manifest(tmp_path / "solve_manifest.json")
    first["config"].pop("out")
    second["config"].pop("out")
    assert first == second


# --- field ---------------------------------------------------------------

def _field(out, *extra):
    return run("field", "--out", out, "--grid", "40x120", *extra)


def test_field_byte_determinism(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _field(a, "--jobs", 1)[0] == 0
    assert _field(b, "--jobs", 1)[0] == 0
    assert _field(c, "--jobs", 4)[0] == 0
    data = (a / "field.csv").read_bytes()
    assert data == (b / "field.csv").read_bytes() == (c / "field.csv").read_bytes()
    assert manifest(a / "field_manifest.json")["mode"] == manifest(c / "field_manifest.json")["mode"]
    lines = data.decode().splitlines()
    assert lines[0] == "rho_um,z_um,intensity"
    assert len(lines) == 1 + 40 * 120


def test_field_json_format(tmp_path):
    assert _field(tmp_path, "--format", "json")[0] == 0
    doc = json.loads((tmp_path / "field.json").read_text())
    assert doc["shape"] == [120, 40]
    assert max(max(row) for row in doc["intensity"]) == 1.0


def test_field_default_grid_peak(tmp_path):
    code, _, _ = run("field", "--out", tmp_path)
    assert code == 0
    raw = np.loadtxt(tmp_path / "field.csv", delimiter=",", skiprows=1)
    assert raw.shape == (400 * 800, 3)
    z_at_max = raw[raw[:, 2] == raw[:, 2].max(), 1]
    assert np.all(np.abs(np.abs(z_at_max) - 69.0) <= 2.0)


def test_field_exterior_range(tmp_path):
    code, _, _ = run("field", "--out", tmp_path, "--grid", "20x50",
                     "--rho-range", "16.1:20", "--z-range=-80:80")
    assert code == 0
    raw = np.loadtxt(tmp_path / "field.csv", delimiter=",", skiprows=1)
    assert np.all(raw[:, 2] < 1e-6)


def test_field_coarse_grid_warns(tmp_path):
    code, _, err = run("field", "--out", tmp_path, "--grid", "10x10")
    assert code == 0
    assert "warning" in err
    assert manifest(tmp_path / "field_manifest.json")["warnings"]


# --- coupling ------------------------------------------------------------

def test_coupling_outputs(coupled):
    code, stdout, out = coupled
    assert code == 0
    rows = (out / "coupling_bottle.csv").read_text().splitlines()
    assert rows[0] == "distance_um,g_over_2pi_MHz"
    assert len(rows) == 1 + 201
    assert (out / "coupling_sphere.csv").exists()
    values = printed(stdout)
    assert abs(int(values["sphere_l"]) - 257) <= 2


def test_coupling_first_row_reference_value(coupled):
    _, _, out = coupled
    first = (out / "coupling_bottle.csv").read_text().splitlines()[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(90.0, abs=14.0)


def test_coupling_gmax_ratio(coupled):
    assert float(printed(coupled[1])["ratio_gmax_sphere_over_bottle"]) == pytest.approx(1.4, abs=0.15)


def test_coupling_surface_ratio(coupled):
    assert float(printed(coupled[1])["ratio_g0_bottle_over_sphere"]) == pytest.approx(1.5, abs=0.15)


def test_coupling_single_sample(tmp_path):
    code, _, _ = run("coupling", "--out", tmp_path, "--samples", 1, "--format", "json")
    assert code == 0
    doc = json.loads((tmp_path / "coupling_bottle.json").read_text())
    assert doc["distance_um"] == [0.0]
    assert len(doc["g_over_2pi_MHz"]) == 1


# --- tuning --------------------------------------------------------------

def test_tuning_report(tuned):
    code, stdout, out = tuned
    assert code == 0
    doc = json.loads((out / "tuning.json").read_text())
    assert set(doc) == {"spectrum", "temperature", "strain", "microsphere", "regime"}
    assert doc["strain"]["stress_GPa"] == pytest.approx(0.15, abs=0.02)
    assert doc["regime"]["strong_coupling"] is True
    assert doc["regime"]["Q"] == 1e9
    assert "strong_coupling=true" in stdout.splitlines()
    assert doc["temperature"]["dT_strict_K"] > doc["temperature"]["dT_K"]


def test_tuning_temperature_reference_value(tuned):
    doc = json.loads((tuned[2] / "tuning.json").read_text())
    assert doc["temperature"]["dT_K"] == pytest.approx(31.0, abs=1.0)


# --- oracle-check --------------------------------------------------------

def test_oracle_check(tmp_path):
    code, stdout, _ = run("oracle-check", "--table", DATA / "oracle_table.txt")
    assert code == 0
    assert "200/200" in stdout
    bad = tmp_path / "bad.txt"
    bad.write_text("J 0 0.5 9.4e-1\n")
    code, stdout, _ = run("oracle-check", "--table", bad)
    assert code == 1 and "MISMATCH" in stdout
    assert run("oracle-check", "--table", tmp_path / "none.txt")[0] == 2
    bad.write_text("K 0 0.5 1.0\n")
    assert run("oracle-check", "--table", bad)[0] == 2
