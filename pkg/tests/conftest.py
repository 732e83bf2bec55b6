import numpy as np
import pytest

from irsmec.scenario import (
    Geometry,
    PathLossModel,
    SystemConfig,
    TaskRanges,
    draw_channels,
    draw_tasks,
    place_devices,
)

MODEL = PathLossModel()


def make_cell(seed, devices=1, elements=40, antennas=5, offsets=None, disc=None,
              task_ranges=None, **cfg_kwargs):
    """One realization of the default cell: (channels, tasks, config)."""
    config = SystemConfig(num_devices=devices, num_elements=elements,
                          num_antennas=antennas, **cfg_kwargs)
    if disc is not None:
        geometry = Geometry.disc(center=disc[0], radius=disc[1])
    else:
        geometry = Geometry.explicit(offsets or [(280.0, 10.0)] * devices)
    positions = place_devices(geometry, devices, seed)
    channels = draw_channels(positions, config, MODEL, geometry, seed)
    tasks = draw_tasks(devices, task_ranges or TaskRanges(), seed)
    return channels, tasks, config


@pytest.fixture
def rng():
    return np.random.default_rng(0)
