"""Result persistence: CSV and JSONL, fixed schema, millisecond latencies."""

from __future__ import annotations

import csv
import json

from .experiment import ResultRow

__all__ = ["CSV_FIELDS", "write_results", "read_results"]

CSV_FIELDS = (
    "scenario", "sweep_param", "sweep_value", "scheme", "quant", "realization",
    "seed", "device_avg_latency_ms", "per_device_latency_ms", "iterations",
    "converged", "walltime_ms",
)


def _fmt_value(v):
    return str(v) if isinstance(v, int) else f"{v:g}"


def _row_record(row):
    return {
        "scenario": row.scenario,
        "sweep_param": row.sweep_param,
        "sweep_value": _fmt_value(row.sweep_value),
        "scheme": row.scheme,
        "quant": row.quant,
        "realization": row.realization,
        "seed": row.seed,
        "device_avg_latency_ms": f"{row.device_avg_latency_ms:.3f}",
        "per_device_latency_ms": ";".join(f"{t:.3f}" for t in row.per_device_latency_ms),
        "iterations": row.iterations,
        "converged": "true" if row.converged else "false",
        "walltime_ms": f"{row.walltime_ms:.3f}",
    }


def write_results(rows, path, format="csv"):
    """Write rows to `path`; latencies carry three decimals of a millisecond."""
    if format not in ("csv", "jsonl"):
        raise ValueError("format must be 'csv' or 'jsonl'")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if format == "csv":
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for row in rows:
                writer.writerow(_row_record(row))
        else:
            for row in rows:
                rec = _row_record(row)
                rec["realization"] = row.realization
                rec["seed"] = row.seed
                rec["iterations"] = row.iterations
                rec["converged"] = row.converged
                fh.write(json.dumps(rec) + "\n")


def read_results(path):
    """Parse a results CSV back into ResultRow objects."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            value = rec["sweep_value"]
            try:
                value = int(value)
            except ValueError:
                value = float(value)
            per_device = tuple(float(t) for t in rec["per_device_latency_ms"].split(";")
                               if t != "")
            rows.append(ResultRow(
                scenario=rec["scenario"],
                sweep_param=rec["sweep_param"],
                sweep_value=value,
                scheme=rec["scheme"],
                quant=rec["quant"],
                realization=int(rec["realization"]),
                seed=int(rec["seed"]),
                device_avg_latency_ms=float(rec["device_avg_latency_ms"]),
                per_device_latency_ms=per_device,
                iterations=int(rec["iterations"]),
                converged=rec["converged"] == "true",
                walltime_ms=float(rec["walltime_ms"]),
            ))
    return rows
