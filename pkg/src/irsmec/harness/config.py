"""Experiment configuration: JSON ingestion, defaults, and sweep expansion.

An empty JSON document reproduces the default cell (300 m radius, 5-antenna
AP, 1 MHz band, -114 dBm noise, one cell-edge device).  All embedded
values are SI: watts, hertz, bits, meters, cycles per second.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from ..scenario import Geometry, PathLossModel, SystemConfig, TaskRanges

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SWEEP_PARAMETERS",
    "SCHEMES",
    "config_from_json",
    "config_to_json",
    "load_config",
    "scenario_pieces",
]

SWEEP_PARAMETERS = (
    "N", "f_e_total", "d", "d1", "alpha_irs", "K", "ici_db", "quantization_bits",
)
SCHEMES = ("with-irs", "randphase", "without-irs")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    geometry: Geometry
    path_loss: PathLossModel
    system: SystemConfig
    tasks: TaskRanges
    sweep_parameter: str
    sweep_values: tuple
    schemes: tuple[str, ...]
    realizations: int
    base_seed: int
    multistart: int

    def __post_init__(self):
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.multistart < 1:
            raise ConfigError("multistart must be >= 1")
        if self.sweep_parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}")
        if not self.sweep_values:
            raise ConfigError("sweep.values must be non-empty")
        if any(b <= a for a, b in zip(self.sweep_values, self.sweep_values[1:])):
            raise ConfigError("sweep.values must be strictly increasing")
        if not self.schemes:
            raise ConfigError("schemes must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"schemes entry {s!r} not in {SCHEMES}")
        if self.sweep_parameter == "K":
            if self.geometry.offsets is not None:
                raise ConfigError("sweeping K requires disc placement in geometry")
        elif self.geometry.offsets is not None \
                and len(self.geometry.offsets) != self.system.num_devices:
            raise ConfigError("geometry.devices must list one offset per device")
        if self.sweep_parameter == "d1" and self.geometry.offsets is None:
            raise ConfigError("sweeping d1 requires explicit device offsets")
        if self.sweep_parameter == "quantization_bits":
            if any(int(v) not in (0, 1, 2) for v in self.sweep_values):
                raise ConfigError("quantization_bits values must be 0, 1, or 2")


def _take(block, key, default, caster, where):
    if key in block:
        try:
            return caster(block.pop(key))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.{key}: {exc}") from exc
    return default


def _no_leftovers(block, where):
    if block:
        raise ConfigError(f"unknown field {where}.{next(iter(block))!r}")


def _pair(v):
    lo, hi = v
    return float(lo), float(hi)


def config_from_json(obj):
    """Build an ExperimentConfig from a parsed JSON document."""
    if not isinstance(obj, dict):
        raise ConfigError("configuration must be a JSON object")
    obj = dict(obj)
    scenario = _take(obj, "scenario", "default", str, "")

    sys_block = dict(obj.pop("system", {}))
    system = SystemConfig(
        bandwidth=_take(sys_block, "bandwidth_hz", 1e6, float, "system"),
        tx_power=_take(sys_block, "tx_power_w", 1e-3, float, "system"),
        noise_power=_take(sys_block, "noise_power_w", 3.98e-15, float, "system"),
        ici_power=_take(sys_block, "ici_power_w", 0.0, float, "system"),
        num_antennas=_take(sys_block, "ap_antennas", 5, int, "system"),
        num_elements=_take(sys_block, "irs_elements", 40, int, "system"),
        num_devices=_take(sys_block, "devices", 1, int, "system"),
        weights=_take(sys_block, "weights", None, lambda w: w and tuple(w), "system"),
    )
    _no_leftovers(sys_block, "system")

    geo_block = dict(obj.pop("geometry", {}))
    cell_radius = _take(geo_block, "cell_radius", 300.0, float, "geometry")
    devices = geo_block.pop("devices", None)
    disc = geo_block.pop("disc", None)
    _no_leftovers(geo_block, "geometry")
    if devices is not None and disc is not None:
        raise ConfigError("geometry: give either devices or disc, not both")
    if devices is not None:
        geometry = Geometry.explicit([_pair(d) for d in devices], cell_radius)
    elif disc is not None:
        disc = dict(disc)
        geometry = Geometry.disc(
            center=_take(disc, "center", (280.0, 10.0), _pair, "geometry.disc"),
            radius=_take(disc, "radius", 10.0, float, "geometry.disc"),
            cell_radius=cell_radius)
        _no_leftovers(disc, "geometry.disc")
    elif system.num_devices == 1:
        geometry = Geometry.explicit([(280.0, 10.0)], cell_radius)
    else:
        geometry = Geometry.disc(cell_radius=cell_radius)

    pl_block = dict(obj.pop("path_loss", {}))
    path_loss = PathLossModel(
        pl0_db=_take(pl_block, "pl0_db", 30.0, float, "path_loss"),
        d0=_take(pl_block, "d0", 1.0, float, "path_loss"),
        alpha_ua=_take(pl_block, "alpha_ua", 3.5, float, "path_loss"),
        alpha_ui=_take(pl_block, "alpha_ui", 2.2, float, "path_loss"),
        alpha_ia=_take(pl_block, "alpha_ia", 2.2, float, "path_loss"),
    )
    _no_leftovers(pl_block, "path_loss")

    task_block = dict(obj.pop("tasks", {}))
    tasks = TaskRanges(
        bits=_take(task_block, "bits", (250e3, 350e3), _pair, "tasks"),
        cycles_per_bit=_take(task_block, "cycles_per_bit", (700.0, 800.0), _pair, "tasks"),
        local_rate=_take(task_block, "local_cycles_per_s", (4e8, 6e8), _pair, "tasks"),
        edge_total=_take(task_block, "edge_total_cycles_per_s", 50e9, float, "tasks"),
    )
    _no_leftovers(task_block, "tasks")

    sweep_block = dict(obj.pop("sweep", {}))
    parameter = _take(sweep_block, "parameter", "N", str, "sweep")
    values = _take(sweep_block, "values", (system.num_elements,), tuple, "sweep")
    _no_leftovers(sweep_block, "sweep")
    values = tuple(int(v) if parameter in ("N", "K", "quantization_bits") else float(v)
                   for v in values)

    schemes = _take(obj, "schemes", SCHEMES, lambda s: tuple(s), "")
    realizations = _take(obj, "realizations", 100, int, "")
    base_seed = _take(obj, "base_seed", 20200, int, "")
    multistart = _take(obj, "multistart", 1, int, "")
    _no_leftovers(obj, "")

    try:
        return ExperimentConfig(scenario, geometry, path_loss, system, tasks,
                                parameter, values, schemes, realizations,
                                base_seed, multistart)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_json(config):
    """Inverse of config_from_json (round-trips through JSON)."""
    geometry = {"cell_radius": config.geometry.cell_radius}
    if config.geometry.offsets is not None:
        geometry["devices"] = [list(o) for o in config.geometry.offsets]
    else:
        geometry["disc"] = {"center": list(config.geometry.disc_center),
                            "radius": config.geometry.disc_radius}
    return {
        "scenario": config.scenario,
        "geometry": geometry,
        "path_loss": {
            "pl0_db": config.path_loss.pl0_db,
            "d0": config.path_loss.d0,
            "alpha_ua": config.path_loss.alpha_ua,
            "alpha_ui": config.path_loss.alpha_ui,
            "alpha_ia": config.path_loss.alpha_ia,
        },
        "system": {
            "bandwidth_hz": config.system.bandwidth,
            "tx_power_w": config.system.tx_power,
            "noise_power_w": config.system.noise_power,
            "ici_power_w": config.system.ici_power,
            "ap_antennas": config.system.num_antennas,
            "irs_elements": config.system.num_elements,
            "devices": config.system.num_devices,
            "weights": list(config.system.weights),
        },
        "tasks": {
            "bits": list(config.tasks.bits),
            "cycles_per_bit": list(config.tasks.cycles_per_bit),
            "local_cycles_per_s": list(config.tasks.local_rate),
            "edge_total_cycles_per_s": config.tasks.edge_total,
        },
        "sweep": {"parameter": config.sweep_parameter,
                  "values": list(config.sweep_values)},
        "schemes": list(config.schemes),
        "realizations": config.realizations,
        "base_seed": config.base_seed,
        "multistart": config.multistart,
    }


def load_config(path):
    """Parse an ExperimentConfig from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_json(obj)


def scenario_pieces(config, sweep_value):
    """Concrete (geometry, path_loss, system, tasks, quant_bits) at one sweep value."""
    geometry, model = config.geometry, config.path_loss
    system, tasks = config.system, config.tasks
    quant_bits = 0
    p = config.sweep_parameter
    if p == "N":
        system = replace(system, num_elements=int(sweep_value))
    elif p == "f_e_total":
        tasks = replace(tasks, edge_total=float(sweep_value))
    elif p == "d":
        if geometry.offsets is not None:
            offsets = tuple((float(sweep_value), dbar) for _, dbar in geometry.offsets)
            geometry = replace(geometry, offsets=offsets)
        else:
            geometry = replace(geometry,
                               disc_center=(float(sweep_value), geometry.disc_center[1]))
    elif p == "d1":
        offsets = list(geometry.offsets)
        offsets[0] = (float(sweep_value), offsets[0][1])
        geometry = replace(geometry, offsets=tuple(offsets))
    elif p == "alpha_irs":
        model = replace(model, alpha_ui=float(sweep_value), alpha_ia=float(sweep_value))
    elif p == "K":
        system = replace(system, num_devices=int(sweep_value), weights=None)
    elif p == "ici_db":
        system = replace(system,
                         ici_power=system.noise_power * 10.0 ** (float(sweep_value) / 10.0))
    elif p == "quantization_bits":
        quant_bits = int(sweep_value)
    return geometry, model, system, tasks, quant_bits
