"""Command-line interface.

Subcommands:
  solve    one instance -> Solution as JSON on stdout
  run      experiment config (path or preset name) -> results file
  preset   canned configuration -> JSON on stdout
  oracle   small-instance exhaustive phase-grid check
  report   results file -> latency figures
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from ..scenario import draw_channels, draw_tasks, mix_seed, place_devices
from ..solver import (
    SolverOptions,
    grid_oracle,
    quantize_phases,
    solve_multi_device,
    solve_randphase,
    solve_without_irs,
)
from .config import ConfigError, config_to_json, load_config, scenario_pieces
from .experiment import run_experiment
from .plots import render_report
from .presets import PRESET_NAMES, preset
from .results import read_results, write_results

__all__ = ["main"]


def _resolve_config(spec):
    if os.path.exists(spec):
        return load_config(spec)
    if spec in PRESET_NAMES:
        return preset(spec)
    raise ConfigError(f"{spec!r} is neither a config file nor one of: "
                      + ", ".join(PRESET_NAMES))


def _instance(config, sweep_index, seed):
    if not 0 <= sweep_index < len(config.sweep_values):
        raise ConfigError(f"sweep index {sweep_index} out of range")
    value = config.sweep_values[sweep_index]
    geometry, model, system, ranges, quant_bits = scenario_pieces(config, value)
    positions = place_devices(geometry, system.num_devices, seed)
    channels = draw_channels(positions, system, model, geometry, seed)
    tasks = draw_tasks(system.num_devices, ranges, seed)
    return channels, tasks, system, quant_bits


def _solution_json(sol):
    latency = sol.latency
    return {
        "scheme": sol.scheme,
        "quantization": sol.quantization,
        "theta": None if sol.theta is None else [round(t, 6) for t in sol.theta],
        "ell_bits": [int(v) for v in sol.ell],
        "f_edge_cycles_per_s": [float(v) for v in sol.f_edge],
        "latency_ms": {
            "per_device": [round(t * 1e3, 3) for t in latency.total_s],
            "local": [round(t * 1e3, 3) for t in latency.local_s],
            "edge": [round(t * 1e3, 3) for t in latency.edge_s],
            "device_avg": round(float(np.mean(latency.total_s)) * 1e3, 3),
            "weighted_objective": round(latency.objective_s * 1e3, 3),
        },
        "objective_trace_ms": [round(t * 1e3, 3) for t in sol.objective_trace],
        "iterations": sol.iterations,
        "converged": sol.converged,
    }


def _cmd_solve(args):
    config = _resolve_config(args.config)
    seed = args.seed if args.seed is not None else config.base_seed
    channels, tasks, system, quant_bits = _instance(config, args.sweep_index, seed)
    options = SolverOptions(seed=seed, multistart=args.multistart)
    if args.scheme == "with-irs":
        sol = solve_multi_device(channels, tasks, system, options)
    elif args.scheme == "randphase":
        sol = solve_randphase(channels, tasks, system, seed=seed, options=options)
    else:
        sol = solve_without_irs(channels, tasks, system, options)
    bits = args.quant_bits if args.quant_bits is not None else quant_bits
    if bits and args.scheme != "without-irs":
        sol = quantize_phases(sol, bits, channels, tasks, system, options)
    json.dump(_solution_json(sol), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_run(args):
    config = _resolve_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.multistart is not None:
        overrides["multistart"] = args.multistart
    if overrides:
        config = replace(config, **overrides)
    rows = run_experiment(config, workers=args.workers)
    write_results(rows, args.out, format=args.format)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_preset(args):
    json.dump(config_to_json(preset(args.name)), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_oracle(args):
    config = _resolve_config(args.config) if args.config else None
    if config is None:
        from .config import config_from_json
        config = config_from_json({"system": {"irs_elements": args.elements,
                                              "devices": args.devices},
                                   "geometry": {"devices": [[280.0, 10.0]] * args.devices}})
    seed = args.seed if args.seed is not None else config.base_seed
    channels, tasks, system, _ = _instance(config, args.sweep_index, seed)
    options = SolverOptions(seed=seed, multistart=args.multistart)
    oracle_s = grid_oracle(channels, tasks, system, resolution_deg=args.resolution,
                           options=options)
    sol = solve_multi_device(channels, tasks, system, options)
    solver_s = sol.latency.objective_s
    json.dump({
        "oracle_ms": round(oracle_s * 1e3, 3),
        "solver_ms": round(solver_s * 1e3, 3),
        "gap_percent": round(100.0 * (solver_s - oracle_s) / oracle_s, 3),
    }, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_report(args):
    rows = read_results(args.results)
    paths = render_report(rows, args.out_dir, fmt=args.fmt)
    for p in paths:
        print(p)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(prog="irsmec",
                                     description="IRS-aided MEC latency simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance, print the solution as JSON")
    p.add_argument("config", help="config file path or preset name")
    p.add_argument("--scheme", default="with-irs",
                   choices=("with-irs", "randphase", "without-irs"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sweep-index", type=int, default=0)
    p.add_argument("--multistart", type=int, default=1)
    p.add_argument("--quant-bits", type=int, default=None, choices=(0, 1, 2))
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("run", help="run an experiment sweep, write results")
    p.add_argument("config", help="config file path or preset name")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--format", default="csv", choices=("csv", "jsonl"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="override base_seed")
    p.add_argument("--multistart", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", help="print a canned experiment config as JSON")
    p.add_argument("name")
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("oracle", help="compare the solver with the phase-grid oracle")
    p.add_argument("--config", default=None, help="config file path or preset name")
    p.add_argument("--elements", type=int, default=2, help="N when no config is given")
    p.add_argument("--devices", type=int, default=1, help="K when no config is given")
    p.add_argument("--resolution", type=float, default=5.0, help="grid step, degrees")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sweep-index", type=int, default=0)
    p.add_argument("--multistart", type=int, default=1)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("report", help="render latency figures from a results CSV")
    p.add_argument("results")
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--fmt", default="png", choices=("png", "pdf", "svg"))
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
