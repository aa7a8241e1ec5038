"""Figure-reproduction experiments returning CSV-ready rows, plus output plumbing.

Every runner is a pure function of (scenario, sweep, seeds): rows are produced
in sweep order whether or not sweep points are evaluated in parallel, and
floats are written with ``repr`` so reruns give byte-identical files.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .bargaining import evaluate, largest_remainder, user_noise
from .channel import ChannelSet, ModuleAllocation, align_all, draw_channels
from .covert import covert_rate, max_covert_ratio
from .mpso import SwarmConfig, optimize_allocation
from .radar import max_effective_range
from .scenario import Scenario
from .waveform import WaveformConfig, random_bits, transmit_receive, write_iq

RADAR_COLUMNS = ["block", "bandwidth_hz", "detection_limit_m", "resolution_limit_m",
                 "max_effective_m", "limiting_factor"]
TRACE_COLUMNS = ["iteration", "mpso_nash_log", "mpso_nash_product"]
BASELINE_TRACE_COLUMNS = ["pso_nash_log", "pso_nash_product"]
ALLOCATION_COLUMNS = ["user", "power_w", "bandwidth_hz", "modules", "rate_bps",
                      "utility_bps", "warden_error"]
ELEMENTS_COLUMNS = ["num_elements", "sum_covert_rate_perfect_csi",
                    "sum_covert_rate_worst_case", "baseline_no_ris"]
PAP_COLUMNS = ["pap", "max_effective_radar_range_m", "sum_covert_rate_bps"]
WAVEFORM_COLUMNS = ["snr_db", "ber", "delay_error_samples", "chirp_rejection_db"]


# ---------------------------------------------------------------------------
# sweep parsing and parallel map

def parse_sweep(spec: str, integer: bool = False) -> list[float]:
    """Parse ``"a,b,c"`` (explicit), ``"lo:hi:n"`` (linear) or ``"lo:hi:n:log"``."""
    try:
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            if len(parts) == 4 and parts[3] == "log":
                if lo <= 0 or hi <= 0:
                    raise ValueError
                values = list(np.geomspace(lo, hi, n)) if n > 1 else [lo]
            else:
                values = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
        else:
            values = [float(v) for v in spec.split(",") if v.strip()]
        if not values:
            raise ValueError
    except ValueError:
        raise ValueError(f"malformed sweep spec {spec!r}; use 'a,b,c', 'lo:hi:n' or 'lo:hi:n:log'")
    if integer:
        return [int(round(v)) for v in values]
    return [float(v) for v in values]


def ordered_map(func, items: Sequence, workers: int = 1) -> list:
    """``map`` that may fan out to processes but always returns results in input order."""
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# ---------------------------------------------------------------------------
# radar range vs bandwidth

def radar_range_rows(scenario: Scenario, bandwidths: Iterable[float]) -> list[dict[str, Any]]:
    """Two blocks: without RIS assist (threshold reduction 1) and with the scenario's."""
    rows = []
    radar_power = scenario.budgets.radar_power
    blocks = [("no_ris", replace(scenario.radar, ris_threshold_reduction=1.0)),
              ("ris", scenario.radar)]
    for name, params in blocks:
        for bw in bandwidths:
            rep = max_effective_range(params, radar_power, bw)
            rows.append({"block": name, "bandwidth_hz": float(bw),
                         "detection_limit_m": rep.detection_limited_range,
                         "resolution_limit_m": rep.resolution_limited_range,
                         "max_effective_m": rep.max_effective_range,
                         "limiting_factor": rep.limiting_factor})
    return rows


# ---------------------------------------------------------------------------
# bargaining optimization

def _log_product_row(value: float) -> tuple[float, float]:
    return value, (float(np.exp(value)) if value > -1e5 else 0.0)


def optimize_rows(scenario: Scenario, seed: int = 0, config: SwarmConfig | None = None,
                  baseline: bool = False, csi_error: float | None = None):
    """Run MPSO (and optionally plain PSO) on one channel draw.

    Returns ``(trace_rows, allocation_rows, feasible)``.
    """
    config = replace(config or SwarmConfig(), seed=seed)
    channels = draw_channels(scenario, seed)
    alloc, best, trace = optimize_allocation(scenario, channels, config, csi_error)
    columns = list(trace.global_best)
    base_trace = None
    if baseline:
        _, _, base_trace = optimize_allocation(scenario, channels, config.baseline(), csi_error)
    trace_rows = []
    for i, v in enumerate(columns):
        row = {"iteration": i + 1}
        row["mpso_nash_log"], row["mpso_nash_product"] = _log_product_row(v)
        if base_trace is not None:
            row["pso_nash_log"], row["pso_nash_product"] = _log_product_row(base_trace.global_best[i])
        trace_rows.append(row)

    report = evaluate(scenario, channels, alloc, csi_error)
    alloc_rows = []
    for k in range(scenario.num_users):
        alloc_rows.append({"user": k, "power_w": alloc.power_per_user[k],
                           "bandwidth_hz": alloc.bandwidth_per_user[k],
                           "modules": alloc.modules_per_user[k],
                           "rate_bps": float(report.rates[k]),
                           "utility_bps": float(report.utilities[k]),
                           "warden_error": float(report.warden_errors[k].min())})
    return trace_rows, alloc_rows, report.feasible


# ---------------------------------------------------------------------------
# covert rate vs number of RIS elements

def no_ris_sum_rate(scenario: Scenario, channels: ChannelSet, csi_error: float = 0.0) -> float:
    """Sum rate of a JRCC transmitter without RIS.

    Equal bandwidth split; each user gets an equal share of the power budget,
    reduced to the largest covert power against the direct warden paths.
    """
    c = scenario.covert
    b = scenario.budgets
    K = scenario.num_users
    cap = _covert_power_cap(scenario, np.abs(channels.direct_warden), csi_error)
    power = min(b.total_power / K, cap)
    bw = b.total_bandwidth / K
    noise = user_noise(scenario, [bw])[0]
    mags = np.maximum(np.abs(channels.direct_user) - csi_error, 0.0)
    return float(sum(covert_rate(c.antenna_gain * power, bw, m, noise) for m in mags))


def _covert_power_cap(scenario: Scenario, warden_mags: np.ndarray, csi_error: float) -> float:
    c = scenario.covert
    if warden_mags.size == 0:
        return np.inf
    gain = c.antenna_gain * float(np.max((warden_mags + csi_error) ** 2))
    if gain <= 0:
        return np.inf
    return max_covert_ratio(c.warden_samples, c.covert_threshold) * c.warden_noise_power / gain


def _elements_point(args) -> tuple[float, float, float]:
    scenario, seeds, epsilon, config = args
    perfect, worst, base = [], [], []
    for s in seeds:
        channels = draw_channels(scenario, s)
        cfg = replace(config, seed=s)
        a_p, _, _ = optimize_allocation(scenario, channels, cfg, csi_error=0.0)
        perfect.append(evaluate(scenario, channels, a_p, 0.0).sum_rate)
        a_w, _, _ = optimize_allocation(scenario, channels, cfg, csi_error=epsilon)
        worst.append(evaluate(scenario, channels, a_w, epsilon).sum_rate)
        base.append(no_ris_sum_rate(scenario, channels))
    return float(np.mean(perfect)), float(np.mean(worst)), float(np.mean(base))


def rate_vs_elements_rows(scenario: Scenario, elements: Sequence[int], channel_seeds: int = 10,
                          epsilon: float | None = None, seed: int = 0,
                          config: SwarmConfig | None = None,
                          workers: int = 1) -> list[dict[str, Any]]:
    """Re-optimized sum covert rate per surface size, averaged over channel seeds.

    A point whose allocation is infeasible contributes a rate of 0 bit/s.
    """
    eps = scenario.covert.csi_error if epsilon is None else epsilon
    config = config or SwarmConfig()
    for L in elements:
        if L % scenario.ris.num_modules:
            raise ValueError(f"{L} elements not divisible by {scenario.ris.num_modules} modules")
    seeds = list(range(seed, seed + channel_seeds))
    jobs = [(scenario.with_elements(L), seeds, eps, config) for L in elements]
    results = ordered_map(_elements_point, jobs, workers)
    return [{"num_elements": int(L), "sum_covert_rate_perfect_csi": p,
             "sum_covert_rate_worst_case": w, "baseline_no_ris": b}
            for L, (p, w, b) in zip(elements, results)]


# ---------------------------------------------------------------------------
# power allocation parameter trade-off

def pap_sum_rate(scenario: Scenario, channels: ChannelSet, pap: float,
                 csi_error: float = 0.0) -> float:
    """Sum covert rate at a given PAP with an even split of power, bandwidth and modules.

    Each user's power share is reduced to its largest covert power when needed.
    """
    K = scenario.num_users
    b = scenario.budgets
    modules = largest_remainder(np.ones(K), b.total_modules)
    alloc = ModuleAllocation.for_ris(modules, scenario.ris)
    phases = align_all(channels, alloc, scenario.ris.phase_bits, scenario.ris.element_amplitude)
    owner = alloc.owners(channels.num_elements)
    coef = phases.coefficients
    h_user = np.array([channels.direct_user[k] + (coef[owner == k]
                       * channels.cascade_user[owner == k, k]).sum() for k in range(K)])
    assigned = owner >= 0
    h_w = channels.direct_warden + (coef[assigned, None] * channels.cascade_warden[assigned]).sum(0)
    cap = _covert_power_cap(scenario, np.abs(h_w), csi_error)
    power = min(pap * b.total_power / K, cap)
    bw = b.total_bandwidth / K
    noise = user_noise(scenario, [bw])[0]
    gain = scenario.covert.antenna_gain
    mags = np.maximum(np.abs(h_user) - csi_error, 0.0)
    return float(sum(covert_rate(gain * power, bw, m, noise) for m in mags))


def pap_tradeoff_rows(scenario: Scenario, paps: Sequence[float], channel_seeds: int = 10,
                      seed: int = 0) -> list[dict[str, Any]]:
    """Radar range and sum covert rate versus PAP (density-noise model)."""
    for p in paps:
        if not 0 <= p <= 1:
            raise ValueError(f"pap {p} outside [0, 1]")
    scenario = replace(scenario, covert=replace(scenario.covert, noise_mode="density-noise"))
    channels = [draw_channels(scenario, s) for s in range(seed, seed + channel_seeds)]
    rows = []
    for p in paps:
        radar_power = scenario.budgets.total_power * (1.0 - p)
        rng = max_effective_range(scenario.radar, radar_power, scenario.budgets.radar_bandwidth)
        rate = float(np.mean([pap_sum_rate(scenario, ch, p) for ch in channels]))
        rows.append({"pap": float(p), "max_effective_radar_range_m": rng.max_effective_range,
                     "sum_covert_rate_bps": rate})
    return rows


# ---------------------------------------------------------------------------
# waveform

def waveform_rows(config: WaveformConfig, snrs_db: Sequence[float],
                  dump_path: str | Path | None = None) -> list[dict[str, Any]]:
    """BER, delay error and chirp rejection over an SNR sweep (``inf`` = noiseless)."""
    rows = []
    bits = random_bits(config)
    for i, snr_db in enumerate(snrs_db):
        snr = float("inf") if np.isinf(snr_db) else 10.0 ** (snr_db / 10.0)
        cfg = replace(config, snr=snr, seed=config.seed + i)
        rep = transmit_receive(bits, cfg, keep_signal=dump_path is not None and i == 0)
        if rep.received is not None:
            write_iq(dump_path, rep.received)
        err = (rep.estimated_delay - cfg.target_delay) * cfg.sample_rate
        rows.append({"snr_db": float(snr_db), "ber": rep.bit_error_rate,
                     "delay_error_samples": float(round(err, 9)),
                     "chirp_rejection_db": rep.chirp_rejection})
    return rows


# ---------------------------------------------------------------------------
# output

def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c, "")) for c in columns])
    return buf.getvalue()


def write_csv(path: str | Path, rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(rows, columns))
    return path


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: str | Path, command: str, flags: dict[str, Any], seed: int,
                   outputs: Sequence[str | Path], started: _dt.datetime,
                   scenario_path: str | Path | None = None) -> Path:
    """Write ``<command>.manifest.json`` describing one run."""
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "flags": flags,
        "seed": seed,
        "tool_version": __version__,
        "scenario_path": str(scenario_path) if scenario_path else None,
        "scenario_sha256": file_sha256(scenario_path) if scenario_path else None,
        "started": started.isoformat(),
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": [{"path": os.path.basename(str(p)), "sha256": file_sha256(p)} for p in outputs],
    }
    path = out_dir / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
