"""Monte-Carlo experiment orchestration.

One cell = (sweep value, scheme, realization).  Each cell derives its own
64-bit seed from (base_seed, sweep index, realization) -- not the scheme,
so all schemes see identical channels and tasks and comparisons are
paired.  Cells are embarrassingly parallel; output order is fixed by
sorting regardless of worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..scenario import draw_channels, draw_tasks, mix_seed, place_devices
from ..solver import (
    SolverOptions,
    quantize_phases,
    solve_multi_device,
    solve_randphase,
    solve_without_irs,
)
from .config import scenario_pieces

__all__ = ["ResultRow", "run_experiment", "solve_cell"]

_QUANT_TAGS = {0: "continuous", 1: "1-bit", 2: "2-bit"}


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    sweep_param: str
    sweep_value: object
    scheme: str
    quant: str
    realization: int
    seed: int
    device_avg_latency_ms: float
    per_device_latency_ms: tuple[float, ...]
    iterations: int
    converged: bool
    walltime_ms: float


def solve_cell(config, sweep_index, scheme, realization):
    """Generate, solve, and audit a single experiment cell."""
    value = config.sweep_values[sweep_index]
    seed = mix_seed(config.base_seed, sweep_index, realization)
    geometry, model, system, ranges, quant_bits = scenario_pieces(config, value)
    positions = place_devices(geometry, system.num_devices, seed)
    channels = draw_channels(positions, system, model, geometry, seed)
    tasks = draw_tasks(system.num_devices, ranges, seed)
    options = SolverOptions(seed=seed,
                            multistart=config.multistart if scheme == "with-irs" else 1)
    start = time.perf_counter()
    if scheme == "with-irs":
        sol = solve_multi_device(channels, tasks, system, options)
    elif scheme == "randphase":
        sol = solve_randphase(channels, tasks, system, seed=seed, options=options)
    elif scheme == "without-irs":
        sol = solve_without_irs(channels, tasks, system, options)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if quant_bits and scheme != "without-irs":
        sol = quantize_phases(sol, quant_bits, channels, tasks, system, options)
    walltime_ms = (time.perf_counter() - start) * 1e3
    total_ms = sol.latency.total_s * 1e3
    return ResultRow(
        scenario=config.scenario,
        sweep_param=config.sweep_parameter,
        sweep_value=value,
        scheme=scheme,
        quant=_QUANT_TAGS[quant_bits] if scheme != "without-irs" else "continuous",
        realization=realization,
        seed=seed,
        device_avg_latency_ms=float(np.mean(total_ms)),
        per_device_latency_ms=tuple(float(t) for t in total_ms),
        iterations=sol.iterations,
        converged=sol.converged,
        walltime_ms=walltime_ms,
    )


def _cell(args):
    return solve_cell(*args)


def run_experiment(config, workers=1):
    """All rows of one experiment, sorted by (sweep value, scheme, realization)."""
    cells = [(config, si, scheme, r)
             for si in range(len(config.sweep_values))
             for scheme in sorted(config.schemes)
             for r in range(config.realizations)]
    if workers > 1 and len(cells) > 1:
        chunk = max(1, len(cells) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell, cells, chunksize=chunk))
    else:
        rows = [solve_cell(*c) for c in cells]
    order = {v: i for i, v in enumerate(config.sweep_values)}
    rows.sort(key=lambda r: (order[r.sweep_value], r.scheme, r.realization))
    return rows
