from .config import (
    ConfigError,
    ExperimentConfig,
    SCHEMES,
    SWEEP_PARAMETERS,
    config_from_json,
    config_to_json,
    load_config,
    scenario_pieces,
)
from .experiment import ResultRow, run_experiment, solve_cell
from .plots import render_report
from .presets import PRESET_NAMES, preset
from .results import CSV_FIELDS, read_results, write_results

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SCHEMES",
    "SWEEP_PARAMETERS",
    "config_from_json",
    "config_to_json",
    "load_config",
    "scenario_pieces",
    "ResultRow",
    "run_experiment",
    "solve_cell",
    "render_report",
    "PRESET_NAMES",
    "preset",
    "CSV_FIELDS",
    "read_results",
    "write_results",
]
