"""Devices, LIS units, resource groups and uplink power control."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigError, SystemConfig

_EPS = 1e-9


@dataclass(frozen=True)
class Device:
    id: int
    position: tuple[float, float, float]
    snr: float = 0.0  # transmit SNR rho_k (linear)

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]

    @property
    def z(self) -> float:
        return self.position[2]


@dataclass(frozen=True, eq=False)
class LisUnit:
    """Square 2L x 2L subarray centred under one device.

    ``antennas`` has shape (M, 3), rows ordered vertical-index major: row
    ``a * side + b`` is lattice point (offset_a, offset_b) on (x, y), which is
    the element order of ``d_v(phi_v) kron d_h(phi_h)``.
    """

    device_id: int
    center: tuple[float, float, float]
    antennas: np.ndarray
    spacing: float
    half_side: float

    @property
    def n_antennas(self) -> int:
        return self.antennas.shape[0]


@dataclass(frozen=True)
class ResourceGroups:
    groups: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def group_of(self, device_id: int) -> int:
        for i, g in enumerate(self.groups):
            if device_id in g:
                return i
        raise KeyError(device_id)


def _axis_points(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + _EPS)) + 1
    return lo + step * np.arange(n)


def build_device_grid(config: SystemConfig) -> list[Device]:
    """Lattice of devices with pitch ``d_m`` covering the region, boundaries included.

    Devices are ordered y-major (row by row) and carry their power-controlled SNR.
    """
    (x_lo, x_hi), (y_lo, y_hi) = config.region_x, config.region_y
    if x_hi < x_lo or y_hi < y_lo:
        raise ConfigError("device region is empty", "region_x" if x_hi < x_lo else "region_y")
    if not config.spacing > 0:
        raise ConfigError("d_m must be positive", "d_m")
    xs = _axis_points(x_lo, x_hi, config.spacing)
    ys = _axis_points(y_lo, y_hi, config.spacing)
    z = config.height
    devices = []
    for y in ys:
        for x in xs:
            dev = Device(len(devices), (float(x), float(y), float(z)))
            devices.append(dataclasses.replace(dev, snr=set_transmit_power(dev, config.target_snr)))
    return devices


def lattice_offsets(side: int, half_side: float) -> np.ndarray:
    """Cell-centred offsets ``(i + 1/2) dL - L`` for ``i = 0..side-1``."""
    pitch = 2.0 * half_side / side
    return (np.arange(side) + 0.5) * pitch - half_side


def build_lis_unit(device: Device, config: SystemConfig) -> LisUnit:
    side = math.isqrt(config.antennas)
    if side * side != config.antennas:
        raise ConfigError(f"M={config.antennas} is not a perfect square", "M")
    off = lattice_offsets(side, config.half_side)
    ox, oy = np.meshgrid(off, off, indexing="ij")
    antennas = np.zeros((config.antennas, 3))
    antennas[:, 0] = device.x + ox.ravel()
    antennas[:, 1] = device.y + oy.ravel()
    antennas.setflags(write=False)
    return LisUnit(device.id, (device.x, device.y, 0.0), antennas, config.delta_l, config.half_side)


def units_overlap(a: LisUnit, b: LisUnit) -> bool:
    """True iff the two unit squares intersect with positive area."""
    wx = min(a.center[0] + a.half_side, b.center[0] + b.half_side) - max(
        a.center[0] - a.half_side, b.center[0] - b.half_side
    )
    wy = min(a.center[1] + a.half_side, b.center[1] + b.half_side) - max(
        a.center[1] - a.half_side, b.center[1] - b.half_side
    )
    tol = _EPS * max(a.half_side, b.half_side)
    return wx > tol and wy > tol


def assign_resource_groups(units: list[LisUnit]) -> ResourceGroups:
    """Greedy colouring of the overlap graph.

    Units are visited in a canonical (y, x, id) order so the result does not
    depend on the order of ``units``.
    """
    ordered = sorted(units, key=lambda u: (u.center[1], u.center[0], u.device_id))
    colour: dict[int, int] = {}
    for i, u in enumerate(ordered):
        taken = {colour[v.device_id] for v in ordered[:i] if units_overlap(u, v)}
        c = 0
        while c in taken:
            c += 1
        colour[u.device_id] = c
    n = max(colour.values(), default=-1) + 1
    groups = tuple(tuple(d for d in sorted(colour) if colour[d] == c) for c in range(n))
    return ResourceGroups(groups)


def set_transmit_power(device: Device, target_snr: float) -> float:
    """Transmit SNR giving ``target_snr`` per antenna at the unit-centre antenna.

    The centre antenna sits at distance z_k with gain^2 * pathloss^2 = 1 / (4 pi z_k^2).
    """
    if target_snr < 0:
        raise ValueError("target SNR must be non-negative")
    return target_snr * 4.0 * math.pi * device.z**2
