import csv
import io
import json
import math

import numpy as np
import pytest

from rpmtwpa.cli import main
from rpmtwpa.config import parse_config
from rpmtwpa.errors import ConfigError
from rpmtwpa.mixer import LossModel, PumpConfig
from rpmtwpa.sweep import Metric, evaluate_design
from rpmtwpa.circuit import derive_device


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_defaults_reproduce_reference_device():
    cfg = parse_config("[resonator]\n")
    assert cfg.device.critical_current == pytest.approx(2.75e-6)
    assert cfg.device.junction_capacitance == pytest.approx(39.5e-15)
    assert cfg.device.n_cells == 2000
    assert cfg.pump.beta == pytest.approx(1.37 / 11)
    assert cfg.design == pytest.approx((20e-15, 11e-12))
    assert cfg.resonance_frequency == pytest.approx(6.06e9)
    assert cfg.loss.eta == 1.0
    assert cfg.grid.n_points == 2001


@pytest.mark.parametrize(
    "text, field",
    [
        ("[device]\nic_ua = -2\n[resonator]\n", "ic_ua"),
        ("[resonator]\ncr_pf = abc\n", "cr_pf"),
        ("[resonator]\n[loss]\neta = 1.2\n", "eta"),
        ("[resonator]\nbogus = 1\n", "bogus"),
        ("[resonator]\n[search]\n", "exactly one"),
        ("[device]\n", "exactly one"),
        ("[resonator]\n[pump]\nip_ua = 3\n", "ip_ua"),
        ("[search]\n[metrics]\nnames = gain, power\n", "power"),
        ("[resonator]\nfr_ghz\n", "fr_ghz"),
    ],
)
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError, match=field):
        parse_config(text)


def test_parse_error_reports_line(tmp_path, capsys):
    path = write(tmp_path, "[resonator]\ncc_ff = 20\n  broken line without section\n[[x\n")
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o")]) == 2
    assert "line" in capsys.readouterr().err


def test_negative_critical_current_exit_code(tmp_path, capsys):
    path = write(tmp_path, "[device]\nic_ua = -1\n[resonator]\n")
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o")]) == 2
    assert "ic_ua" in capsys.readouterr().err


@pytest.fixture(scope="module")
def spectrum_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("spectrum")
    path = write(tmp, "[resonator]\n")
    assert main(["spectrum", "--config", path, "--out", str(tmp / "out")]) == 0
    return tmp / "out"


def test_spectrum_outputs(spectrum_run):
    rows = read_csv(spectrum_run / "spectrum.csv")
    assert len(rows) == 2001
    assert list(rows[0]) == [
        "frequency_hz", "gain_db", "lossy_gain_db", "squeeze_min_db", "squeeze_max_db", "abs_squeeze_db", "flag",
    ]
    flagged = [float(r["frequency_hz"]) for r in rows if r["flag"] != "ok"]
    assert any(abs(f - 6.06e9) < 10e6 for f in flagged)
    for r in rows:
        if r["flag"] == "ok":
            assert r["lossy_gain_db"] == r["gain_db"]
        else:
            assert r["gain_db"] == ""
    svg = (spectrum_run / "spectrum.svg").read_text()
    assert svg.startswith("<?xml") and "ic_ua = 2.75" in svg


def test_outputs_echo_resolved_config(spectrum_run):
    header = [l for l in (spectrum_run / "spectrum.csv").read_text().splitlines() if l.startswith("#")]
    echoed = "\n".join(h[2:] for h in header[1:])
    cfg = parse_config(echoed)
    assert cfg.resolved == parse_config("[resonator]\n").resolved


def test_infeasible_cell_exit_code(tmp_path):
    path = write(tmp_path, "[resonator]\ncc_ff = 48\n")
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o")]) == 3


def test_loss_sweep_outputs(tmp_path):
    path = write(tmp_path, "[resonator]\n[loss]\neta = 0.9\neta_values = 1, 0.9, 0.5\n[grid]\npoints = 201\n")
    assert main(["spectrum", "--config", path, "--out", str(tmp_path / "o"), "--format", "csv"]) == 0
    rows = read_csv(tmp_path / "o" / "loss_sweep.csv")
    assert len(rows) == 3 * 201
    assert not (tmp_path / "o" / "loss_sweep.svg").exists()


SWEEP = """
[search]
cc_min_ff = 10
cc_max_ff = 50
cr_min_pf = 5
cr_max_pf = 60
n_cc = 5
n_cr = 4
[metrics]
names = gain, squeeze, bandwidth_gain
[grid]
points = 401
"""


def test_sweep_outputs_and_invalid_rows(tmp_path):
    path = write(tmp_path, SWEEP)
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "o")]) == 0
    for name in ("gain", "squeeze", "bandwidth_gain"):
        rows = read_csv(tmp_path / "o" / f"sweep2d_{name}.csv")
        assert len(rows) == 20
        for r in rows:
            if float(r["cc_f"]) > 47.87e-15:
                assert r["flag"] == "invalid" and r["value"] == ""
            else:
                assert r["flag"] == "ok" and r["value"] != ""
        assert (tmp_path / "o" / f"sweep2d_{name}.svg").exists()


def test_sweep_single_cell_matches_direct_metric(tmp_path):
    path = write(tmp_path, "[search]\ncc_min_ff=20\ncc_max_ff=20\ncr_min_pf=11\ncr_max_pf=11\n")
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "o"), "--format", "csv"]) == 0
    (row,) = read_csv(tmp_path / "o" / "sweep2d_gain.csv")
    device = derive_device(2.75e-6, 39.5e-15, 2000, 50.0)
    value, _ = evaluate_design(
        device, PumpConfig(1.37e-6, 6e9, 2.75e-6), LossModel(), 6.06e9, 20e-15, 11e-12, Metric("gain", 5e9)
    )
    assert float(row["value"]) == pytest.approx(value, rel=1e-11)
    spectra = read_csv(tmp_path / "o" / "sweep1d_spectra.csv")
    assert len(spectra) == 2001


def test_sweep_deterministic_across_threads(tmp_path, monkeypatch):
    path = write(tmp_path, SWEEP)
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "a"), "--threads", "1"]) == 0
    monkeypatch.setenv("TWPA_THREADS", "6")
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "b")]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_bad_thread_env(tmp_path, monkeypatch):
    monkeypatch.setenv("TWPA_THREADS", "many")
    path = write(tmp_path, SWEEP)
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "o")]) == 2


def test_optimize_synthetic_objective(tmp_path):
    text = "[search]\nn_cc=9\nn_cr=9\n[objective]\nkind = quadratic\ntarget_cc_ff = 12.5\ntarget_cr_pf = 33.3\n"
    path = write(tmp_path, text)
    assert main(["optimize", "--config", path, "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["best_point"]["cc_f"] == pytest.approx(12.5e-15, abs=0.1e-15)
    assert report["best_point"]["cr_f"] == pytest.approx(33.3e-12, abs=0.1e-12)
    assert report["n_evaluations"] == len(report["trace"])
    assert report["config"]["objective"]["kind"] == "quadratic"


def test_optimize_reference_slice(tmp_path):
    text = "[search]\ncc_min_ff=5\ncc_max_ff=45\ncr_min_pf=11\ncr_max_pf=11\nn_cc=41\n[objective]\npareto = bandwidth_gain\n"
    path = write(tmp_path, text)
    assert main(["optimize", "--config", path, "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert 15e-15 <= report["best_point"]["cc_f"] <= 25e-15
    assert report["derived_cell"]["c_ground_f"] > 0
    front = read_csv(tmp_path / "o" / "front.csv")
    assert len(front) >= 1 and set(front[0]) == {"cc_f", "cr_f", "gain", "bandwidth_gain"}


def test_optimize_empty_feasible_set(tmp_path):
    path = write(tmp_path, "[search]\ncc_min_ff = 48\ncc_max_ff = 60\n")
    assert main(["optimize", "--config", path, "--out", str(tmp_path / "o")]) == 4


def test_command_requires_matching_block(tmp_path):
    path = write(tmp_path, "[resonator]\n")
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "o")]) == 2
