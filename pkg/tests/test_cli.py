import json
import subprocess
import sys

import numpy as np
import pytest

from quasi1d.cli import main


def run(argv, capsys):
    status = main(argv)
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1
    return status, json.loads(out[0])


def test_presets_listing(capsys):
    status, payload = run(["presets"], capsys)
    assert status == 0
    assert {"fig1b", "fig2", "fig3", "fig4b", "figEIT", "fig5"} <= set(payload["presets"])


def test_spectrum_fig3_gives_eleven_spectra(tmp_path, capsys):
    status, payload = run(["spectrum", "--preset", "fig3", "--out", str(tmp_path / "run1"),
                           "--set", "analyses.spectrum.grid.num=51",
                           "--set", "analyses.beer_lambert.grid.num=51"], capsys)
    assert status == 0
    spectra = sorted((tmp_path / "run1").glob("spectrum_*.csv"))
    assert len(spectra) == 11
    assert payload["counts"] == {"spectrum": 11, "beer_lambert": 1}
    assert (tmp_path / "run1" / "metadata.json").exists()


def test_modes_fig2(tmp_path, capsys):
    status, payload = run(["modes", "--preset", "fig2", "--out", str(tmp_path),
                           "--set", "analyses.modes.sweep.num=4", "--threads", "2"], capsys)
    assert status == 0
    data = np.loadtxt(tmp_path / "modes.csv", delimiter=",", skiprows=2)
    assert data.shape[0] == 4 * 5


def test_default_analysis_inserted(tmp_path, capsys):
    status, payload = run(["dynamics", "--preset", "fig2", "--out", str(tmp_path)], capsys)
    assert status == 0
    assert payload["files"] == ["dynamics.csv", "dynamics_noninteracting.csv"]


def test_output_directory_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QUASI1D_OUT", str(tmp_path / "env"))
    status, _ = run(["eit", "--preset", "figEIT", "--set", "analyses.eit.grid.num=11"], capsys)
    assert status == 0
    assert (tmp_path / "env" / "eit.csv").exists()


def test_greens_map(tmp_path, capsys):
    mirror = {"thickness": 0.02, "permittivity": 60.0}
    cfg = {
        "model": {"type": "layered", "omega": 6.0, "gamma_1d": 1.0,
                  "slabs": [mirror, {"thickness": 1.0, "permittivity": 1.0}, mirror]},
        "chain": {"gamma_prime": 1.0, "geometry": {"kind": "explicit", "positions": [0.5]}},
        "analyses": {"greens": {"reference": "two_mirror",
                                "grid": {"start": 0.1, "stop": 0.9, "num": 7}}},
    }
    path = tmp_path / "stack.json"
    path.write_text(json.dumps(cfg))
    status, payload = run(["greens", "--config", str(path), "--omega", "6.1",
                           "--out", str(tmp_path)], capsys)
    assert status == 0
    data = np.loadtxt(tmp_path / "greens.csv", delimiter=",", skiprows=2)
    np.testing.assert_allclose(data[:, 2] + 1j * data[:, 3], data[:, 4] + 1j * data[:, 5],
                               rtol=1e-6)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["files"]["greens.csv"]["omega"] == 6.1


@pytest.mark.parametrize("argv", [
    ["spectrum"],
    ["spectrum", "--preset", "fig3", "--config", "x.json"],
    ["bogus"],
    ["spectrum", "--preset", "nope"],
])
def test_usage_errors(argv, capsys):
    status, payload = run(argv, capsys)
    assert status == 2
    assert payload["kind"] == "usage"


def test_config_errors(tmp_path, capsys):
    status, payload = run(["spectrum", "--preset", "fig3", "--set", "chain.geometry.n=0",
                           "--out", str(tmp_path)], capsys)
    assert status == 2
    assert payload["kind"] == "config"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    status, payload = run(["spectrum", "--config", str(bad)], capsys)
    assert status == 2


def test_invalid_override_fails_like_invalid_file(tmp_path, capsys):
    doc = {"preset": "fig2", "chain": {"geometry": {"n": -2}}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    _, from_file = run(["modes", "--config", str(path)], capsys)
    _, from_flag = run(["modes", "--preset", "fig2", "--set", "chain.geometry.n=-2"], capsys)
    assert from_file == from_flag


def test_computation_error_names_operation(tmp_path, capsys):
    cfg = {
        "model": {"type": "bandgap", "j_max": -1.0, "kappa_x": 1.0},
        "chain": {"gamma_prime": 0.0, "geometry": {"kind": "explicit", "positions": [0.0]}},
        "analyses": {"spectrum": {"method": "product",
                                  "grid": {"start": 0.5, "stop": 1.5, "num": 3}}},
    }
    path = tmp_path / "pole.json"
    path.write_text(json.dumps(cfg))
    status, payload = run(["spectrum", "--config", str(path), "--out", str(tmp_path)], capsys)
    assert status == 1
    assert payload["kind"] == "computation"
    assert payload["operation"] == "spectrum"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "quasi1d", "presets"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "ok"
