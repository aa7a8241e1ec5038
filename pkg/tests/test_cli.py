import csv
import json
import subprocess
import sys

import pytest

from jrcc import experiments as ex
from jrcc.cli import main

from conftest import small_doc

HEADERS = {
    "radar_range.csv": ex.RADAR_COLUMNS,
    "optimize_trace.csv": ex.TRACE_COLUMNS + ex.BASELINE_TRACE_COLUMNS,  # run with --baseline
    "optimize_allocation.csv": ex.ALLOCATION_COLUMNS,
    "rate_vs_elements.csv": ex.ELEMENTS_COLUMNS,
    "pap_tradeoff.csv": ex.PAP_COLUMNS,
    "waveform.csv": ex.WAVEFORM_COLUMNS,
}

FAST = {
    "radar-range": ["--bandwidths", "1e5:1e8:7:log"],
    "optimize": ["--iterations", "5", "--baseline"],
    "rate-vs-elements": ["--elements", "90,180", "--channel-seeds", "1", "--iterations", "3"],
    "pap-tradeoff": ["--paps", "0:1:5", "--channel-seeds", "2"],
    "waveform": ["--num-symbols", "100", "--snrs-db", "inf,0,10"],
}


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_documented_headers():
    assert ex.RADAR_COLUMNS == ["block", "bandwidth_hz", "detection_limit_m", "resolution_limit_m",
                                "max_effective_m", "limiting_factor"]
    assert ex.TRACE_COLUMNS + ex.BASELINE_TRACE_COLUMNS == [
        "iteration", "mpso_nash_log", "mpso_nash_product", "pso_nash_log", "pso_nash_product"]
    assert ex.ALLOCATION_COLUMNS == ["user", "power_w", "bandwidth_hz", "modules", "rate_bps",
                                     "utility_bps", "warden_error"]
    assert ex.ELEMENTS_COLUMNS == ["num_elements", "sum_covert_rate_perfect_csi",
                                   "sum_covert_rate_worst_case", "baseline_no_ris"]
    assert ex.PAP_COLUMNS == ["pap", "max_effective_radar_range_m", "sum_covert_rate_bps"]
    assert ex.WAVEFORM_COLUMNS == ["snr_db", "ber", "delay_error_samples", "chirp_rejection_db"]


@pytest.mark.parametrize("command", list(FAST))
def test_command_rerun_byte_identical(tmp_path, command):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([command, *FAST[command], "--out-dir", str(a)]) == 0
    assert main([command, *FAST[command], "--out-dir", str(b)]) == 0
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (a / name).read_bytes() == (b / name).read_bytes()
        assert rows(a / name)[0] == HEADERS[name]
        assert b"\r\n" in (a / name).read_bytes()
    manifest = json.loads((a / f"{command}.manifest.json").read_text())
    assert manifest["command"] == command and manifest["seed"] == 0
    assert {o["path"] for o in manifest["outputs"]} == set(csvs)
    for o in manifest["outputs"]:
        assert o["sha256"] == ex.file_sha256(a / o["path"])
    if command != "waveform":
        assert len(manifest["scenario_sha256"]) == 64


def test_radar_single_point(tmp_path):
    assert main(["radar-range", "--bandwidths", "2e6", "--out-dir", str(tmp_path)]) == 0
    body = rows(tmp_path / "radar_range.csv")[1:]
    assert [r[0] for r in body] == ["no_ris", "ris"]


def test_optimize_one_iteration(tmp_path):
    assert main(["optimize", "--iterations", "1", "--out-dir", str(tmp_path)]) == 0
    assert len(rows(tmp_path / "optimize_trace.csv")) == 2
    alloc = rows(tmp_path / "optimize_allocation.csv")[1:]
    assert len(alloc) == 3
    assert sum(int(r[3]) for r in alloc) == 9
    assert sum(float(r[1]) for r in alloc) <= 100.0 * (1 + 1e-9)


def test_optimize_infeasible_exit_2(tmp_path, fig5_doc):
    fig5_doc["covert"]["warden_noise_power_dbw"] = -150
    path = tmp_path / "loud.json"
    path.write_text(json.dumps(fig5_doc))
    assert main(["optimize", str(path), "--iterations", "3", "--out-dir", str(tmp_path)]) == 2
    last = rows(tmp_path / "optimize_allocation.csv")[-1]
    assert last[0] == "infeasible"


def test_validate_exit_codes(tmp_path, capsys):
    assert main(["validate"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(small_doc(**{"ris.num_modules": 3, "covert.covert_threshold": 1.2})))
    assert main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out
    assert "ris.num_elements" in out and "covert.covert_threshold" in out


def test_invalid_scenario_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(small_doc(**{"ris.num_modules": 3})))
    assert main(["radar-range", str(bad), "--out-dir", str(tmp_path)]) == 1


def test_malformed_sweep_exit_1(tmp_path):
    assert main(["radar-range", "--bandwidths", "1:2", "--out-dir", str(tmp_path)]) == 1
    assert main(["pap-tradeoff", "--paps", "0.5,1.5", "--out-dir", str(tmp_path)]) == 1
    assert main(["rate-vs-elements", "--elements", "100", "--out-dir", str(tmp_path)]) == 1


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("JRCC_OUT_DIR", str(tmp_path / "env"))
    assert main(["pap-tradeoff", "--paps", "0,1", "--channel-seeds", "1"]) == 0
    assert (tmp_path / "env" / "pap_tradeoff.csv").exists()
    assert (tmp_path / "env" / "pap-tradeoff.manifest.json").exists()


def test_waveform_dump(tmp_path):
    assert main(["waveform", "--num-symbols", "10", "--snrs-db", "inf", "--dump-iq", "rx.iq",
                 "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "rx.iq").stat().st_size == 10 * 200 * 8
    body = rows(tmp_path / "waveform.csv")[1:]
    assert body[0][1] == "0.0"


def test_parse_sweep():
    assert ex.parse_sweep("1,2,3") == [1.0, 2.0, 3.0]
    assert ex.parse_sweep("0:1:3") == [0.0, 0.5, 1.0]
    assert ex.parse_sweep("1:100:3:log") == pytest.approx([1.0, 10.0, 100.0])
    assert ex.parse_sweep("90,180", integer=True) == [90, 180]
    for bad in ("", "1:2", "a,b", "0:1:3:cubic", "0:1:0"):
        with pytest.raises(ValueError):
            ex.parse_sweep(bad)


def test_rate_vs_elements_worker_independent(fig5):
    from jrcc.mpso import SwarmConfig
    sc = fig5
    cfg = SwarmConfig(iterations=3)
    one = ex.rate_vs_elements_rows(sc, [90, 180], 1, 0.01, 0, cfg, workers=1)
    two = ex.rate_vs_elements_rows(sc, [90, 180], 1, 0.01, 0, cfg, workers=2)
    assert one == two


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "jrcc", "radar-range", "--bandwidths", "1e6",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "radar-range.manifest.json").exists()
