"""Command-line front end: ``jrcc <command> [options]``.

Exit codes: 0 success, 1 invalid scenario or arguments, 2 infeasible optimization.
"""

from __future__ import annotations

import argparse
import datetime as dt
import os
import sys
from pathlib import Path

from . import experiments as ex
from .mpso import SwarmConfig
from .scenario import ScenarioError, bundled_path, check, from_dict, load
from .waveform import WaveformConfig

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2

DEFAULT_SCENARIOS = {
    "radar-range": "paper_fig4",
    "optimize": "paper_fig5",
    "rate-vs-elements": "paper_fig6",
    "pap-tradeoff": "paper_fig7",
    "validate": "paper_fig5",
}


def _common(p: argparse.ArgumentParser, scenario: bool = True) -> None:
    if scenario:
        p.add_argument("scenario", nargs="?", default=None,
                       help="scenario JSON file (default: the bundled parameter set for this command)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None, help="output directory (default: $JRCC_OUT_DIR or .)")


def _swarm(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iterations", type=int, default=300)
    p.add_argument("--particles", type=int, default=10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jrcc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radar-range", help="maximum effective radar range vs bandwidth")
    _common(p)
    p.add_argument("--bandwidths", default="1e5:1e8:50:log",
                   help="sweep: 'a,b,c', 'lo:hi:n' or 'lo:hi:n:log' (Hz)")

    p = sub.add_parser("optimize", help="Nash bargaining allocation with MPSO")
    _common(p)
    _swarm(p)
    p.add_argument("--baseline", action="store_true", help="also run plain PSO")
    p.add_argument("--worst-case-epsilon", type=float, default=None)

    p = sub.add_parser("rate-vs-elements", help="sum covert rate vs number of RIS elements")
    _common(p)
    _swarm(p)
    p.add_argument("--elements", default="90,180,270")
    p.add_argument("--channel-seeds", type=int, default=10)
    p.add_argument("--worst-case-epsilon", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("pap-tradeoff", help="radar range and covert rate vs PAP")
    _common(p)
    p.add_argument("--paps", default="0:1:21")
    p.add_argument("--channel-seeds", type=int, default=10)

    p = sub.add_parser("waveform", help="chirp signal-sharing transceiver BER sweep")
    _common(p, scenario=False)
    p.add_argument("--snrs-db", default="inf,-30,-25,-20,-15,-10,-5,0,5,10,13",
                   help="per-sample SNR sweep in dB; 'inf' is noiseless")
    p.add_argument("--sample-rate", type=float, default=20e6)
    p.add_argument("--chirp-bandwidth", type=float, default=10e6)
    p.add_argument("--symbol-duration", type=float, default=10e-6)
    p.add_argument("--psk-order", type=int, default=4)
    p.add_argument("--num-symbols", type=int, default=2000)
    p.add_argument("--target-delay", type=float, default=2e-6)
    p.add_argument("--phase-bits", type=int, default=0)
    p.add_argument("--dump-iq", default=None, help="write the first sweep point's received signal")

    p = sub.add_parser("validate", help="check a scenario file and list every violation")
    p.add_argument("scenario", nargs="?", default=None)
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get("JRCC_OUT_DIR") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _scenario_path(args) -> Path:
    return Path(args.scenario) if args.scenario else bundled_path(DEFAULT_SCENARIOS[args.command])


def _flags(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out_dir")}


def _cmd_validate(args) -> int:
    import json
    path = _scenario_path(args)
    diagnostics = check(from_dict(json.loads(Path(path).read_text())))
    for d in diagnostics:
        print(f"invalid: {d}")
    if diagnostics:
        return EXIT_INVALID
    print(f"ok: {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        return _cmd_validate(args)

    started = dt.datetime.now(dt.timezone.utc)
    out = _out_dir(args)
    scenario_path = None
    outputs = []
    status = EXIT_OK
    try:
        if args.command != "waveform":
            scenario_path = _scenario_path(args)
            scenario = load(scenario_path)

        if args.command == "radar-range":
            rows = ex.radar_range_rows(scenario, ex.parse_sweep(args.bandwidths))
            outputs.append(ex.write_csv(out / "radar_range.csv", rows, ex.RADAR_COLUMNS))

        elif args.command == "optimize":
            config = SwarmConfig(particles=args.particles, iterations=args.iterations)
            trace, alloc, feasible = ex.optimize_rows(scenario, args.seed, config, args.baseline,
                                                      args.worst_case_epsilon)
            cols = ex.TRACE_COLUMNS + (ex.BASELINE_TRACE_COLUMNS if args.baseline else [])
            outputs.append(ex.write_csv(out / "optimize_trace.csv", trace, cols))
            if not feasible:
                alloc.append({"user": "infeasible",
                              "power_w": "no allocation met every covertness and budget constraint"})
                status = EXIT_INFEASIBLE
            outputs.append(ex.write_csv(out / "optimize_allocation.csv", alloc,
                                        ex.ALLOCATION_COLUMNS))

        elif args.command == "rate-vs-elements":
            config = SwarmConfig(particles=args.particles, iterations=args.iterations)
            rows = ex.rate_vs_elements_rows(scenario, ex.parse_sweep(args.elements, integer=True),
                                            args.channel_seeds, args.worst_case_epsilon,
                                            args.seed, config, args.workers)
            outputs.append(ex.write_csv(out / "rate_vs_elements.csv", rows, ex.ELEMENTS_COLUMNS))

        elif args.command == "pap-tradeoff":
            rows = ex.pap_tradeoff_rows(scenario, ex.parse_sweep(args.paps), args.channel_seeds,
                                        args.seed)
            outputs.append(ex.write_csv(out / "pap_tradeoff.csv", rows, ex.PAP_COLUMNS))

        elif args.command == "waveform":
            config = WaveformConfig(sample_rate=args.sample_rate,
                                    chirp_bandwidth=args.chirp_bandwidth,
                                    symbol_duration=args.symbol_duration,
                                    psk_order=args.psk_order, num_symbols=args.num_symbols,
                                    target_delay=args.target_delay, seed=args.seed,
                                    phase_bits=args.phase_bits)
            dump = out / args.dump_iq if args.dump_iq else None
            rows = ex.waveform_rows(config, ex.parse_sweep(args.snrs_db), dump)
            outputs.append(ex.write_csv(out / "waveform.csv", rows, ex.WAVEFORM_COLUMNS))
            if dump:
                outputs.append(dump)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID

    manifest = ex.write_manifest(out, args.command, _flags(args), args.seed, outputs, started,
                                 scenario_path)
    for path in outputs:
        print(path)
    print(manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
