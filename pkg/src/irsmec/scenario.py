"""Cell geometry, path loss, fading channels, and computing tasks.

Coordinate frame: the AP sits at the origin, the IRS on the positive
x-axis at the cell radius.  A device offset (d, dbar) is measured along
and perpendicular to the AP-IRS axis, so the device-IRS distance follows
from plain Euclidean geometry.

Every random block (placement, each channel matrix, the task draws) pulls
from its own counter-based Philox stream derived from a 64-bit seed, so
generation is deterministic and order-independent.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Geometry",
    "PathLossModel",
    "SystemConfig",
    "ChannelSet",
    "TaskSet",
    "TaskRanges",
    "PathLossClampWarning",
    "mix_seed",
    "stream",
    "complex_normal",
    "place_devices",
    "path_loss_gain",
    "draw_channels",
    "draw_tasks",
    "composite_channel",
]


# ---------------------------------------------------------------------------
# Seeding

def _pack(parts):
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        if isinstance(p, str):
            h.update(b"s" + p.encode("utf-8") + b"\x00")
        else:
            h.update(b"i" + int(p).to_bytes(16, "little", signed=True))
    return h.digest()


def mix_seed(*parts):
    """Deterministic 64-bit seed from a tuple of ints/strings."""
    return int.from_bytes(_pack(parts)[:8], "little")


def stream(seed, *tags):
    """Independent counter-based generator for (seed, *tags)."""
    key = int.from_bytes(_pack((seed, *tags)), "little")
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(gen, shape):
    """CN(0, 1) i.i.d. samples via the polar Box-Muller transform."""
    u = gen.random(shape)
    v = gen.random(shape)
    return np.sqrt(-np.log1p(-u)) * np.exp(2j * np.pi * v)


# ---------------------------------------------------------------------------
# Domain types

@dataclass(frozen=True)
class Geometry:
    """Cell layout: AP at the origin, IRS at (cell_radius, 0).

    Devices are placed either at explicit (d, dbar) offsets, or uniformly
    over a disc centred at disc_center (area-uniform).
    """

    cell_radius: float = 300.0                                   # m, AP-IRS distance
    offsets: tuple[tuple[float, float], ...] | None = ((280.0, 10.0),)
    disc_center: tuple[float, float] = (280.0, 10.0)
    disc_radius: float = 10.0

    def __post_init__(self):
        if not self.cell_radius > 0.0:
            raise ValueError("cell_radius must be positive")
        if self.disc_radius < 0.0:
            raise ValueError("disc_radius must be non-negative")
        if self.offsets is not None:
            for d, dbar in self.offsets:
                if not (np.isfinite(d) and np.isfinite(dbar)):
                    raise ValueError("device offsets must be finite")

    @classmethod
    def explicit(cls, offsets, cell_radius=300.0):
        return cls(cell_radius=cell_radius, offsets=tuple(tuple(o) for o in offsets))

    @classmethod
    def disc(cls, center=(280.0, 10.0), radius=10.0, cell_radius=300.0):
        return cls(cell_radius=cell_radius, offsets=None,
                   disc_center=tuple(center), disc_radius=radius)

    @property
    def ap_position(self):
        return np.zeros(2)

    @property
    def irs_position(self):
        return np.array([self.cell_radius, 0.0])


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss: PL(dB) = pl0_db + 10 alpha log10(d / d0)."""

    pl0_db: float = 30.0
    d0: float = 1.0          # m, reference distance
    alpha_ua: float = 3.5    # device-AP exponent
    alpha_ui: float = 2.2    # device-IRS exponent
    alpha_ia: float = 2.2    # IRS-AP exponent

    def __post_init__(self):
        if not self.d0 > 0.0:
            raise ValueError("d0 must be positive")
        for name in ("alpha_ua", "alpha_ui", "alpha_ia"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class SystemConfig:
    """Radio parameters of one cell (SI units throughout)."""

    bandwidth: float = 1e6          # Hz
    tx_power: float = 1e-3          # W per device
    noise_power: float = 3.98e-15   # W (-114 dBm at 1 MHz)
    ici_power: float = 0.0          # W, known inter-cell interference power
    num_antennas: int = 5           # M, AP antennas
    num_elements: int = 40          # N, IRS elements (0 = no surface)
    num_devices: int = 1            # K
    weights: tuple[float, ...] = field(default=None)  # defaults to 1/K each

    def __post_init__(self):
        if not (self.bandwidth > 0 and self.tx_power > 0 and self.noise_power > 0):
            raise ValueError("bandwidth, tx_power and noise_power must be positive")
        if self.ici_power < 0:
            raise ValueError("ici_power must be non-negative")
        if self.num_antennas < 1 or self.num_devices < 1:
            raise ValueError("num_antennas and num_devices must be >= 1")
        if self.num_elements < 0:
            raise ValueError("num_elements must be >= 0")
        if self.weights is None:
            object.__setattr__(self, "weights",
                               (1.0 / self.num_devices,) * self.num_devices)
        else:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.weights) != self.num_devices or any(w <= 0 for w in self.weights):
            raise ValueError("weights must hold one positive entry per device")

    @property
    def effective_noise(self):
        """sigma^2 plus the known inter-cell interference power."""
        return self.noise_power + self.ici_power

    @property
    def weight_array(self):
        return np.asarray(self.weights, dtype=float)


@dataclass(frozen=True)
class ChannelSet:
    """The three channel blocks: direct M x K, device-IRS N x K, IRS-AP M x N."""

    h_d: np.ndarray
    h_r: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        m, k = self.h_d.shape
        n = self.G.shape[1]
        if self.h_r.shape != (n, k) or self.G.shape != (m, n):
            raise ValueError("inconsistent channel dimensions")
        for block in (self.h_d, self.h_r, self.G):
            if block.size and not np.all(np.isfinite(block.view(float))):
                raise ValueError("channel entries must be finite")

    @property
    def num_devices(self):
        return self.h_d.shape[1]

    def without_irs(self):
        """Same direct paths with the reflected path nulled."""
        return ChannelSet(self.h_d.copy(), np.zeros_like(self.h_r), np.zeros_like(self.G))


@dataclass(frozen=True)
class TaskSet:
    """Per-device computing load and the shared edge capability."""

    bits: np.ndarray             # L_k, integer bits
    cycles_per_bit: np.ndarray   # c_k
    local_rate: np.ndarray       # f^l_k, cycles/s at the device
    edge_total: float            # f^e_total, cycles/s at the edge

    def __post_init__(self):
        if np.any(self.bits < 0):
            raise ValueError("task bits must be non-negative")
        if np.any(self.cycles_per_bit <= 0) or np.any(self.local_rate <= 0):
            raise ValueError("cycles_per_bit and local_rate must be positive")
        if not self.edge_total > 0:
            raise ValueError("edge_total must be positive")

    @property
    def num_devices(self):
        return self.bits.shape[0]


@dataclass(frozen=True)
class TaskRanges:
    """Uniform draw ranges for the computing model."""

    bits: tuple[float, float] = (250e3, 350e3)
    cycles_per_bit: tuple[float, float] = (700.0, 800.0)
    local_rate: tuple[float, float] = (4e8, 6e8)
    edge_total: float = 50e9

    def __post_init__(self):
        for name in ("bits", "cycles_per_bit", "local_rate"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range must satisfy lo <= hi")


class PathLossClampWarning(UserWarning):
    """Distance below the path-loss reference distance was clamped."""


# ---------------------------------------------------------------------------
# Generation

def place_devices(geometry, count, seed):
    """Device positions, shape (count, 2).

    Explicit offsets are returned verbatim; disc mode draws area-uniform
    positions (radius = r * sqrt(u)).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if geometry.offsets is not None:
        if len(geometry.offsets) != count:
            raise ValueError(f"geometry lists {len(geometry.offsets)} devices, expected {count}")
        return np.asarray(geometry.offsets, dtype=float).reshape(count, 2)
    gen = stream(seed, "placement")
    radius = geometry.disc_radius * np.sqrt(gen.random(count))
    angle = 2.0 * np.pi * gen.random(count)
    center = np.asarray(geometry.disc_center, dtype=float)
    return center + np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)


def path_loss_gain(distance, alpha, model):
    """Linear power gain at the given distance; clamps below d0 with a warning."""
    if distance < model.d0:
        warnings.warn(f"distance {distance} m below reference {model.d0} m; clamped",
                      PathLossClampWarning, stacklevel=2)
        distance = model.d0
    loss_db = model.pl0_db + 10.0 * alpha * np.log10(distance / model.d0)
    return float(10.0 ** (-loss_db / 10.0))


def _link_gains(positions, model, geometry):
    ap = geometry.ap_position
    irs = geometry.irs_position
    g_ua = np.array([path_loss_gain(np.linalg.norm(p - ap), model.alpha_ua, model)
                     for p in positions])
    g_ui = np.array([path_loss_gain(np.linalg.norm(p - irs), model.alpha_ui, model)
                     for p in positions])
    g_ia = path_loss_gain(np.linalg.norm(irs - ap), model.alpha_ia, model)
    return g_ua, g_ui, g_ia


def draw_channels(positions, config, model, geometry, seed, gains=None):
    """Rayleigh-faded channel blocks for the given device positions.

    Each entry is sqrt(gain) * z with z ~ CN(0, 1) i.i.d. across antennas,
    elements and devices.  `gains` optionally overrides the path-loss
    triple (g_ua, g_ui, g_ia) -- a test hook.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    k = positions.shape[0]
    if k != config.num_devices:
        raise ValueError(f"{k} positions for {config.num_devices} devices")
    m, n = config.num_antennas, config.num_elements
    if gains is None:
        g_ua, g_ui, g_ia = _link_gains(positions, model, geometry)
    else:
        g_ua, g_ui, g_ia = gains
        g_ua = np.broadcast_to(np.asarray(g_ua, dtype=float), (k,))
        g_ui = np.broadcast_to(np.asarray(g_ui, dtype=float), (k,))
    h_d = np.sqrt(g_ua)[None, :] * complex_normal(stream(seed, "h_d"), (m, k))
    h_r = np.sqrt(g_ui)[None, :] * complex_normal(stream(seed, "h_r"), (n, k))
    big_g = np.sqrt(g_ia) * complex_normal(stream(seed, "G"), (m, n))
    return ChannelSet(h_d, h_r, big_g)


def draw_tasks(count, ranges, seed):
    """Uniform task draws; bits are integerized."""
    gen = stream(seed, "tasks")
    bits = np.rint(gen.uniform(*ranges.bits, size=count)).astype(np.int64)
    cycles = gen.uniform(*ranges.cycles_per_bit, size=count)
    local = gen.uniform(*ranges.local_rate, size=count)
    return TaskSet(bits, cycles, local, float(ranges.edge_total))


def composite_channel(channels, theta):
    """Per-device combined channel h_k = h_dk + G diag(e^{j theta}) h_rk, shape M x K."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (channels.h_r.shape[0],):
        raise ValueError("theta length must match the number of IRS elements")
    if theta.size == 0:
        return channels.h_d.copy()
    phase = np.exp(1j * theta)
    return channels.h_d + channels.G @ (phase[:, None] * channels.h_r)
