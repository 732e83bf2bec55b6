"""Figure rendering for finished sweeps: mean latency curves per scheme."""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_report"]

_X_LABELS = {
    "N": "number of IRS elements",
    "f_e_total": "edge computing capability (cycle/s)",
    "d": "device location d (m)",
    "d1": "device-1 location d1 (m)",
    "alpha_irs": "IRS path-loss exponent",
    "K": "number of devices",
    "ici_db": "ICI-to-noise ratio (dB)",
    "quantization_bits": "phase-shift control bits (0 = continuous)",
}

_STYLE = {
    "with-irs": dict(color="tab:blue", marker="o"),
    "randphase": dict(color="tab:orange", marker="s"),
    "without-irs": dict(color="tab:green", marker="^"),
}


def render_report(rows, out_dir, fmt="png"):
    """Render one mean-latency figure per (scenario, sweep parameter).

    Rows with distinct quantization tags get separate curves.  Returns the
    paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    grouped = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
    for row in rows:
        key = (row.scenario, row.sweep_param)
        grouped[key][(row.scheme, row.quant)][row.sweep_value].append(
            row.device_avg_latency_ms)
    paths = []
    for (scenario, param), curves in sorted(grouped.items()):
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        quants = {q for _, q in curves}
        for (scheme, quant), per_value in sorted(curves.items()):
            xs = sorted(per_value)
            means = [float(np.mean(per_value[x])) for x in xs]
            label = scheme if len(quants) == 1 else f"{scheme} ({quant})"
            style = dict(_STYLE.get(scheme, {}))
            if len(quants) > 1 and quant != "continuous":
                style["linestyle"] = "--" if quant == "2-bit" else ":"
                style.pop("color", None)
            ax.plot(xs, means, label=label, **style)
        ax.set_xlabel(_X_LABELS.get(param, param))
        ax.set_ylabel("device-average latency (ms)")
        ax.set_title(scenario)
        ax.grid(True, alpha=0.4)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"{scenario}_{param}.{fmt}")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
