"""Canned experiment configurations for the reference sweeps (figs 4-13)."""

from __future__ import annotations

from ..scenario import Geometry, PathLossModel, SystemConfig, TaskRanges
from .config import ConfigError, ExperimentConfig, SCHEMES

__all__ = ["preset", "PRESET_NAMES"]

_EDGE_SINGLE = Geometry.explicit([(280.0, 10.0)])
_EDGE_PAIR_EQUAL = Geometry.explicit([(280.0, 10.0), (280.0, 10.0)])
_EDGE_PAIR_STAGGERED = Geometry.explicit([(260.0, 10.0), (280.0, 10.0)])
_EDGE_DISC = Geometry.disc(center=(280.0, 10.0), radius=10.0)

_FIXED_TASKS = TaskRanges(bits=(300e3, 300e3), cycles_per_bit=(750.0, 750.0),
                          local_rate=(5e8, 5e8), edge_total=50e9)
_DEFAULT_TASKS = TaskRanges()


def _cfg(name, geometry, devices, parameter, values, schemes=SCHEMES,
         tasks=_DEFAULT_TASKS, realizations=200, elements=40, multistart=1,
         path_loss=PathLossModel()):
    system = SystemConfig(num_devices=devices, num_elements=elements)
    return ExperimentConfig(name, geometry, path_loss, system, tasks,
                            parameter, tuple(values), tuple(schemes),
                            realizations, 20200, multistart)


def _build_fig4():
    # Convergence study: deterministic tasks, lone cell-edge device.
    return _cfg("fig4", _EDGE_SINGLE, 1, "N", (10, 20, 40),
                schemes=("with-irs",), tasks=_FIXED_TASKS, realizations=100)


def _build_fig5():
    # Initialization spread: 100 random restarts per realization.
    return _cfg("fig5", _EDGE_PAIR_EQUAL, 2, "N", (40,),
                schemes=("with-irs",), realizations=20, multistart=100)


def _build_fig6():
    # Phase quantization: continuous vs 1-bit vs 2-bit codebooks.
    return _cfg("fig6", _EDGE_SINGLE, 1, "quantization_bits", (0, 1, 2),
                schemes=("with-irs",))


def _build_fig7():
    return _cfg("fig7", _EDGE_SINGLE, 1, "N", tuple(range(10, 101, 10)),
                realizations=300)


def _build_fig8():
    return _cfg("fig8", _EDGE_SINGLE, 1, "f_e_total",
                tuple(float(v) * 1e9 for v in range(10, 61, 10)))


def _build_fig9():
    return _cfg("fig9", _EDGE_SINGLE, 1, "d",
                (150.0, 175.0, 200.0, 225.0, 250.0, 260.0, 270.0, 280.0, 290.0, 300.0))


def _build_fig10():
    return _cfg("fig10", _EDGE_PAIR_STAGGERED, 2, "N", tuple(range(10, 101, 10)))


def _build_fig11():
    return _cfg("fig11", _EDGE_PAIR_STAGGERED, 2, "d1",
                (180.0, 200.0, 220.0, 240.0, 260.0, 280.0, 300.0))


def _build_fig12():
    return _cfg("fig12", _EDGE_DISC, 1, "K", (1, 2, 3, 4, 5), realizations=300)


def _build_fig13():
    cfg = _cfg("fig13", _EDGE_DISC, 3, "ici_db", (0.0, 5.0, 10.0, 15.0, 20.0))
    return cfg


_BUILDERS = {
    "fig4": _build_fig4, "fig5": _build_fig5, "fig6": _build_fig6,
    "fig7": _build_fig7, "fig8": _build_fig8, "fig9": _build_fig9,
    "fig10": _build_fig10, "fig11": _build_fig11, "fig12": _build_fig12,
    "fig13": _build_fig13,
}

PRESET_NAMES = tuple(sorted(_BUILDERS, key=lambda n: int(n[3:])))


def preset(name):
    """Return the canned ExperimentConfig for one reference sweep."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}") from None
    return builder()
