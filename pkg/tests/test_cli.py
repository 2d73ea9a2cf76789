import json
import math
import subprocess
import sys

import numpy as np
import pytest

from bandedge_fluorescence import __version__, cli
from bandedge_fluorescence.errors import ConfigError


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def read_csv(path):
    lines = path.read_text().split("\n")
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    header = body[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
    return comments, header, data


def test_kernel_fig1_fwhm(tmp_path):
    assert run(tmp_path, "kernel", "--preset", "fig1") == 0
    comments, header, data = read_csv(tmp_path / "kernel.csv")
    assert header == ["omega", "re_g", "im_g", "abs_g", "arg_g"]
    omega, mag = data[:, 0], data[:, 3]
    above = omega[mag >= mag.max() / 2]
    step = omega[1] - omega[0]
    assert above[-1] - above[0] == pytest.approx(400.0, abs=step)
    assert any(f"bandedge_fluorescence {__version__}" in c for c in comments)
    assert any("omega_c=100" in c and "preset=fig1" in c for c in comments)
    assert any("units of beta" in c for c in comments)


def test_spectrum_is_deterministic(tmp_path):
    args = ["spectrum", "--preset", "fig2", "--offset", "0.5", "--n_points", "401"]
    assert run(tmp_path / "a", *args) == 0
    assert run(tmp_path / "b", *args) == 0
    a = (tmp_path / "a" / "spectrum.csv").read_bytes()
    assert a == (tmp_path / "b" / "spectrum.csv").read_bytes()
    assert b"\r" not in a
    comments, header, data = read_csv(tmp_path / "a" / "spectrum.csv")
    assert header == ["omega", "intensity"]
    assert any(c.startswith("# coherent_weight=") for c in comments)
    # values carry 17 significant digits and round-trip exactly
    text = (tmp_path / "a" / "spectrum.csv").read_text().split("\n")
    row = text[len(comments) + 1].split(",")
    assert format(float(row[1]), ".17g") == row[1]


def test_quadrature_fig3_two_intervals(tmp_path):
    code = run(tmp_path, "quadrature", "--preset", "fig3", "--offset", "0.309", "--plot")
    assert code == 0
    report = json.loads((tmp_path / "squeezing.json").read_text())
    in_phase = [q for q in report["quadratures"] if q["theta"] == 0.0][0]
    assert in_phase["n_intervals"] >= 2
    lows = [iv["omega_start"] < 0 for iv in in_phase["intervals"]]
    assert any(lows) and not all(lows)
    _, header, data = read_csv(tmp_path / "quadrature.csv")
    assert header[0] == "omega" and len(header) == 3
    svg = (tmp_path / "quadrature.svg").read_text()
    assert svg.count("<polyline") == 2 and 'version="1.1"' in svg


def test_config_file_and_override_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# free-space run\nmode = markovian\ngamma = 1\nrabi = 2  # overridden below\n"
        "omega_min = -5\nomega_max = 5\nn_points = 11\n"
    )
    assert cli.main(["steady", "--config", str(cfg), "--rabi", "1", "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "steady.json").read_text())
    assert out["s_z"]["re"] == pytest.approx(-1 / 3)
    assert out["params"]["rabi"] == "1"
    assert out["diagnostics"]["memory_time_ratio"] == "inf"


def test_sweep_writes_one_file_per_offset(tmp_path):
    code = run(tmp_path, "sweep", "--preset", "fig2", "--offsets", "2,1,0.5", "--n_points", "801")
    assert code == 0
    files = sorted(p.name for p in tmp_path.glob("spectrum_offset_*.csv"))
    assert files == [f"spectrum_offset_{k:03d}.csv" for k in range(3)]
    summary = json.loads((tmp_path / "sweep.json").read_text())
    assert [s["offset"] for s in summary["spectra"]] == [2.0, 1.0, 0.5]
    comments, _, _ = read_csv(tmp_path / "spectrum_offset_002.csv")
    assert any("offset=0.5" in c for c in comments)


def test_validate_passes(tmp_path, capsys):
    assert run(tmp_path, "validate") == 0
    report = json.loads((tmp_path / "validation.json").read_text())
    assert report["passed"] is True
    assert all(line.startswith("PASS") for line in capsys.readouterr().out.splitlines())


def test_validate_failure_exit_code(tmp_path, monkeypatch):
    from bandedge_fluorescence import validation

    monkeypatch.setattr(
        validation, "run_validation",
        lambda params=None: {"checks": [{"name": "x", "error": 1.0, "tolerance": 0.0,
                                         "passed": False, "detail": {}}], "passed": False},
    )
    assert run(tmp_path, "validate") == cli.EXIT_VALIDATION


@pytest.mark.parametrize(
    "args, field",
    [
        (["spectrum", "--preset", "fig2", "--offset", "1", "--rabi", "-1"], "rabi"),
        (["spectrum", "--preset", "fig2"], "offset"),
        (["spectrum", "--preset", "fig9"], "preset"),
        (["spectrum", "--omega_c", "100", "--offset", "x"], "offset"),
        (["spectrum", "--bogus", "1"], "bogus"),
        (["sweep", "--preset", "fig2"], "offsets"),
        (["steady", "--mode", "markovian"], "gamma"),
        (["spectrum", "--omega_c", "100", "--offset", "1", "--n_points", "1"], "n_points"),
    ],
)
def test_config_errors(tmp_path, capsys, args, field):
    assert run(tmp_path, *args) == cli.EXIT_CONFIG
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1
    assert err.startswith(f"error: {field}:")


def test_numerical_error_exit_code(tmp_path, capsys):
    assert run(tmp_path, "steady", "--preset", "fig1", "--rabi", "0.25") == cli.EXIT_NUMERICAL
    assert "SingularSteadyState" in capsys.readouterr().err


def test_angle_parsing():
    assert cli._angle("theta", "pi/2") == pytest.approx(math.pi / 2)
    assert cli._angle("theta", "-pi") == pytest.approx(-math.pi)
    assert cli._angle("theta", "0.5*pi") == pytest.approx(math.pi / 2)
    assert cli._angle("theta", "1.25") == 1.25
    with pytest.raises(ConfigError):
        cli._angle("theta", "tau")


def test_override_parsing():
    assert cli.parse_overrides(["--plot", "--rabi=2", "--n-points", "5"]) == {
        "plot": "true", "rabi": "2", "n_points": "5"}
    with pytest.raises(ConfigError):
        cli.parse_overrides(["--rabi"])
    with pytest.raises(ConfigError):
        cli.parse_overrides(["rabi", "2"])


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bandedge_fluorescence", "spectrum", "--mode", "markovian",
         "--gamma", "1", "--rabi", "-2", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert proc.stderr.strip() == "error: rabi: must be >= 0, got -2.0"
