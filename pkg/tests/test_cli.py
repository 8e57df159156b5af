import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eogforge.cli import main
from eogforge.serial_io import parse_serial_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def quiet_fig6(tmp_path):
    p = tmp_path / "quiet.json"
    p.write_text(json.dumps({"preset": "fig6", "noise": {"white_noise_std": 0.0,
        "drift_step_std": 0.0, "powerline_amplitude": 0.0}}))
    return p


def run(argv, capsys):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


def write_log(path, codes, bits=10, v_ref=5.0, fs=256.0):
    ms = np.rint(np.arange(len(codes)) / fs * 1000).astype(int)
    rows = "".join(f"{t},{c}\n" for t, c in zip(ms, codes))
    path.write_text(f"# bits={bits}\n# sample_rate_hz={fs:g}\n# v_ref={v_ref}\n" + rows)
    return path


def test_simulate_is_byte_identical(tmp_path, capsys):
    for d in ("a", "b"):
        rc, _, _ = run(["simulate", "--preset", "fig6", "--seed", 3, "--output", tmp_path / d], capsys)
        assert rc == 0
    for name in ("serial.csv", "truth.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    run(["simulate", "--preset", "fig6", "--seed", 4, "--output", tmp_path / "c"], capsys)
    assert (tmp_path / "a/serial.csv").read_bytes() != (tmp_path / "c/serial.csv").read_bytes()


def test_outputs_embed_config_hash(tmp_path, capsys):
    run(["simulate", "--preset", "fig6", "--output", tmp_path], capsys)
    truth = json.loads((tmp_path / "truth.json").read_text())
    log = parse_serial_csv((tmp_path / "serial.csv").read_text())
    assert log.extra["config_hash"] == truth["config_hash"]
    run(["process", tmp_path / "serial.csv", "--preset", "fig6", "--output", tmp_path / "p"], capsys)
    assert (tmp_path / "p/events.csv").read_text().startswith("# config_hash=")
    assert "config_hash" in json.loads((tmp_path / "p/metrics.json").read_text())["provenance"]


def test_noiseless_fig6_process_recovers_all(tmp_path, capsys, quiet_fig6):
    rc, _, _ = run(["simulate", "--config", quiet_fig6, "--output", tmp_path], capsys)
    assert rc == 0
    rc, out, _ = run(["process", tmp_path / "serial.csv", "--config", quiet_fig6,
                      "--truth", tmp_path / "truth.json", "--output", tmp_path / "p"], capsys)
    assert rc == 0
    m = json.loads((tmp_path / "p/metrics.json").read_text())
    assert (m["hits"], m["misses"], m["false_positives"]) == (10, 0, 0)
    assert "hits" in out


def test_shipped_fig6_config_with_scenario(tmp_path, capsys):
    rc, _, _ = run(["simulate", "--config", CONFIGS / "fig6.json", "--output", tmp_path], capsys)
    assert rc == 0
    truth = json.loads((tmp_path / "truth.json").read_text())
    assert len(truth["events"]) == 10


def test_constant_log_infinite_snr(tmp_path, capsys):
    log = write_log(tmp_path / "c.csv", [10] * 300)
    rc, out, _ = run(["process", log, "--preset", "fig6", "--output", tmp_path / "p"], capsys)
    assert rc == 0
    m = json.loads((tmp_path / "p/metrics.json").read_text())
    assert m["snr_infinite"] is True and m["snr_db"] is None and m["n_events"] == 0
    assert "inf" in out


def test_bits_conflict(tmp_path, capsys):
    log = write_log(tmp_path / "c.csv", [10] * 30, bits=12)
    rc, _, err = run(["process", log, "--output", tmp_path / "p"], capsys)
    assert rc == 1 and "bits" in err
    assert not (tmp_path / "p").exists()


def test_bode_rows_and_corner(capsys):
    rc, out, _ = run(["bode", "--f-min", 0.05, "--f-max", 50, "--points", 61], capsys)
    assert rc == 0
    rows = [line for line in out.splitlines() if line and not line.startswith("#")][1:]
    assert len(rows) == 61
    f, db = np.array([[float(x) for x in r.split(",")] for r in rows]).T
    i = np.argmin(np.abs(np.log(f / 0.5)))
    # nearest grid point to 0.5 Hz sits near the high-pass corner
    assert -4.0 < db[i] < -2.0


@pytest.mark.parametrize("fmin,fmax", [(0, 100), (-1, 100), (10, 10), (20, 10)])
def test_bode_invalid_range(fmin, fmax, capsys):
    rc, out, err = run(["bode", "--f-min", fmin, "--f-max", fmax], capsys)
    assert rc == 1 and out == "" and "f_min" in err


def test_metrics_on_reference_sequence_log(tmp_path, capsys):
    # fine-grained log so the two levels survive quantization
    s = math.sqrt(19807119) * 1e-6
    m = math.sqrt(5773240121 - 19807119) * 1e-6
    v_ref, bits = 0.1, 16
    codes = np.rint(np.array([m + s, m - s] * 500) / (v_ref / 2**bits)).astype(int)
    log = write_log(tmp_path / "p.csv", codes, bits=bits, v_ref=v_ref)
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"adc": {"bits": bits, "v_ref": v_ref}}))
    rc, out, _ = run(["metrics", log, "--config", cfg, "--output", tmp_path / "m.json"], capsys)
    assert rc == 0
    rep = json.loads((tmp_path / "m.json").read_text())
    assert rep["snr_db"] == pytest.approx(24.646, abs=2e-3)
    assert "snr" in out.lower()


def test_truth_without_detections(tmp_path, capsys):
    log = write_log(tmp_path / "c.csv", [10] * 600)
    truth = tmp_path / "t.json"
    truth.write_text(json.dumps({"events": [{"onset_s": 0.5, "polarity": "UP"},
                                            {"onset_s": 1.5, "polarity": "DOWN"}]}))
    rc, _, _ = run(["metrics", log, "--preset", "fig6", "--truth", truth,
                    "--output", tmp_path / "m.json"], capsys)
    assert rc == 0
    rep = json.loads((tmp_path / "m.json").read_text())
    assert rep["misses"] == 2 and rep["hits"] == 0 and rep["mean_latency"] is None


def test_unreadable_and_malformed_logs(tmp_path, capsys):
    rc, _, err = run(["metrics", tmp_path / "missing.csv"], capsys)
    assert rc == 2 and "missing.csv" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n4,oops\n")
    rc, _, err = run(["process", bad, "--output", tmp_path / "p"], capsys)
    assert rc == 2 and "line 2" in err
    assert not (tmp_path / "p").exists()
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    rc, _, err = run(["metrics", empty], capsys)
    assert rc == 2 and "warning" in err


def test_missing_scenario_names_path(tmp_path, capsys):
    rc, _, err = run(["simulate", "--scenario", tmp_path / "nope.json", "--output", tmp_path / "o"], capsys)
    assert rc == 1 and "nope.json" in err
    assert not (tmp_path / "o").exists()


def test_invalid_config_names_field(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"afe": {"r3": 0}}))
    rc, _, err = run(["bode", "--config", cfg], capsys)
    assert rc == 1 and "afe.r3" in err


def test_env_config_fallback(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"afe": {"fc_lp": 20.0}}))
    _, default_out, _ = run(["bode"], capsys)
    monkeypatch.setenv("EOGFORGE_CONFIG", str(cfg))
    rc, env_out, _ = run(["bode"], capsys)
    assert rc == 0 and env_out != default_out
    monkeypatch.setenv("EOGFORGE_CONFIG", str(tmp_path / "gone.json"))
    rc, _, err = run(["bode"], capsys)
    assert rc == 1 and "gone.json" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "eogforge", "bode", "--points", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert len(proc.stdout.strip().splitlines()) == 5
