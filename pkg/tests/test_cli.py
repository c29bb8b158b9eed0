import csv
import json
import math

import numpy as np
import pytest

from squeezed_gie.cli import PRESETS, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


def test_entanglement_calibrated(capsys, tmp_path):
    code, out, _ = run(capsys, "entanglement", "--r", 1, "--phi", math.pi / 2, "--out", tmp_path / "e.csv")
    assert code == 0
    assert json.loads(out)["e_fil"] == pytest.approx(0.30, abs=1e-6)
    manifest = json.loads((tmp_path / "e.csv.manifest.json").read_text())
    assert {"config", "version", "wall_time_s", "outputs"} <= set(manifest)


def test_separable_exit_zero(capsys):
    code, out, _ = run(capsys, "entanglement", "--epsilon", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["entangled"] is False and rep["e_fil"] >= 1


def test_exit_codes(capsys):
    code, _, err = run(capsys, "entanglement", "--epsilon", "2")
    assert code == 2 and json.loads(err)["exit_code"] == 2
    code, _, err = run(capsys, "entanglement", "--bogus")
    assert code == 1 and json.loads(err)["error"] == "ConfigError"
    code, _, err = run(capsys, "sweep", "--axis1", "nonsense:0:1:3", "--axis2", "squeeze_r:0:1:3")
    assert code == 1
    code, _, err = run(capsys, "time-to-snr", "--epsilon", "0")
    assert code == 2 and json.loads(err)["error"] == "NoSolutionError"


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"squeeze_r": 0.0, "grav_coupling": {"epsilon": 0.2}}))
    _, out, _ = run(capsys, "entanglement", "--config", cfg)
    a = json.loads(out)["e_fil"]
    _, out, _ = run(capsys, "entanglement", "--config", cfg, "--r", "1.0")
    b = json.loads(out)["e_fil"]
    assert b < a
    # without a coupling the calibrated value is used
    cal = tmp_path / "cal.json"
    cal.write_text(json.dumps({"squeeze_r": 1.0, "squeeze_phi_rad": math.pi / 2, "options": {"omega": None}}))
    _, out, _ = run(capsys, "entanglement", "--config", cal)
    assert json.loads(out)["e_fil"] == pytest.approx(0.30, abs=1e-6)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "entanglement", "--config", bad)[0] == 1


@pytest.fixture(scope="module")
def fig2_left(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "fig2-left.csv"
    assert main(["sweep", "--preset", "fig2-left", "--out", str(out)]) == 0
    return out


def test_fig2_left_preset(fig2_left):
    header, data = read_csv(fig2_left)
    assert header[:3] == ["squeeze_r [1]", "squeeze_phi_rad [rad]", "e_fil [1]"]
    assert data.shape[0] == 101 * 101
    r, phi, e = data[:, 0], data[:, 1], data[:, 2]
    # rows are axis1-major
    assert np.all(np.diff(r.reshape(101, 101)[:, 0]) > 0) and np.all(np.ptp(r.reshape(101, 101), axis=1) == 0)
    near = (np.abs(r - 1.0) < 0.0101) & (np.abs(phi - math.pi / 2) < 1e-9)
    assert near.sum() == 2
    assert np.all(np.abs(e[near] - 0.30) < 0.03)


def test_manifest_replay_bit_exact(capsys, tmp_path):
    out = tmp_path / "s.csv"
    args = ["sweep", "--axis1", "squeeze_r:0:1.5:7", "--axis2", "laser_power_w:1e-12:1e-6:5:log", "--out", out]
    assert run(capsys, *args)[0] == 0
    first = out.read_bytes()
    again = tmp_path / "again.csv"
    assert run(capsys, "replay", str(out) + ".manifest.json", "--out", again, "--threads", "2")[0] == 0
    assert again.read_bytes() == first
    assert run(capsys, *args)[0] == 0
    assert out.read_bytes() == first


def test_poles_and_filters_csv(capsys, tmp_path):
    assert run(capsys, "poles", "--out", tmp_path / "p.csv")[0] == 0
    text = (tmp_path / "p.csv").read_text().splitlines()
    assert len(text) > 1
    assert run(capsys, "filters", "--out", tmp_path / "f.csv")[0] == 0
    assert run(capsys, "spectra", "--out", tmp_path / "s.csv")[0] == 0
    header, data = read_csv(tmp_path / "s.csv")
    assert data.shape[0] == 1001


def test_feedback_bound_command(capsys):
    code, out, _ = run(capsys, "feedback-bound", "--epsilon", "0.25", "--r", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["g_cd_max"] == pytest.approx(0.13398593348237492, rel=1e-9)


def test_presets_complete():
    assert set(PRESETS) == {"fig2-left", "fig2-right", "fig3-left", "fig3-right"}
