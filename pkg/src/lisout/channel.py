"""LOS desired channels, correlated Rician interference channels, MF estimation error."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, SystemConfig
from .geometry import Device, LisUnit

KAPPA_CAP = 1e6  # kappa at or above this is treated as pure LOS

# far branch of the indoor LOS-probability curve
_LOS_FAR_BREAK = 6.5
_LOS_FAR_DECAY = 32.6
_LOS_FAR_SCALE = 0.32


@dataclass(frozen=True)
class LosChannel:
    h: np.ndarray  # (M,) complex
    gain: np.ndarray  # beta^L_m, amplitude
    distance: np.ndarray


@dataclass(frozen=True)
class PathSet:
    theta_v: np.ndarray  # (P,) elevation
    theta_h: np.ndarray  # (P,) azimuth

    @property
    def phi_v(self) -> np.ndarray:
        return np.sin(self.theta_v)

    @property
    def phi_h(self) -> np.ndarray:
        return np.sin(self.theta_h) * np.cos(self.theta_h)

    @property
    def gain(self) -> np.ndarray:
        # clip guards tiny negative cosines at exactly +-pi/2
        return np.sqrt(np.clip(np.cos(self.theta_v) * np.cos(self.theta_h), 0.0, None))


@dataclass(frozen=True)
class CorrelationRoot:
    matrix: np.ndarray  # R^{1/2}, (M, P)
    pathloss: np.ndarray  # diagonal of l^NL, (M,)
    steering: np.ndarray  # D, (M, P), columns alpha_p d(phi_v, phi_h)


@dataclass(frozen=True)
class InterferenceChannel:
    h: np.ndarray
    los: np.ndarray
    nlos: np.ndarray
    kappa: float


def antenna_distances(position, unit: LisUnit) -> np.ndarray:
    return np.sqrt(((unit.antennas - np.asarray(position, dtype=float)) ** 2).sum(axis=1))


def _los_vector(position, unit: LisUnit, wavelength: float) -> LosChannel:
    d = antenna_distances(position, unit)
    z = float(position[2])
    if not z > 0:
        raise ConfigError("device height must be positive", "z")
    gain = np.sqrt(z / d) / np.sqrt(4.0 * math.pi * d * d)
    h = gain * np.exp(-2j * math.pi * d / wavelength)
    return LosChannel(h, gain, d)


def los_channel(device: Device, unit: LisUnit, wavelength: float) -> LosChannel:
    """Deterministic LOS channel from ``device`` to every antenna of ``unit``.

    Used both for the desired link (device k, unit k) and for the LOS part of
    a cross link (device j, unit k).
    """
    return _los_vector(device.position, unit, wavelength)


def steering_vector(phi_v: float, phi_h: float, antennas: int, spacing: float, wavelength: float) -> np.ndarray:
    side = math.isqrt(antennas)
    if side * side != antennas:
        raise ConfigError(f"M={antennas} is not a perfect square", "M")
    n = np.arange(side)
    k = 2.0 * math.pi * spacing / wavelength
    dv = np.exp(1j * k * n * phi_v)
    dh = np.exp(1j * k * n * phi_h)
    return np.kron(dv, dh) / math.sqrt(antennas)


def steering_matrix(paths: PathSet, antennas: int, spacing: float, wavelength: float) -> np.ndarray:
    """D = [alpha_p d(phi_v_p, phi_h_p)]_p, shape (M, P)."""
    side = math.isqrt(antennas)
    n = np.arange(side)[:, None]
    k = 2.0 * math.pi * spacing / wavelength
    dv = np.exp(1j * k * n * paths.phi_v[None, :])  # (side, P)
    dh = np.exp(1j * k * n * paths.phi_h[None, :])
    d = (dv[:, None, :] * dh[None, :, :]).reshape(antennas, -1) / math.sqrt(antennas)
    return d * paths.gain[None, :]


def correlation_root(device: Device, unit: LisUnit, paths: PathSet, config: SystemConfig) -> CorrelationRoot:
    d = antenna_distances(device.position, unit)
    pathloss = d ** (-config.beta_pl / 2.0)
    steer = steering_matrix(paths, unit.n_antennas, unit.spacing, config.wavelength)
    return CorrelationRoot(pathloss[:, None] * steer, pathloss, steer)


def rician_weights(kappa: float) -> tuple[float, float]:
    """(LOS, NLOS) amplitude weights sqrt(k/(k+1)), sqrt(1/(k+1))."""
    if kappa >= KAPPA_CAP or math.isinf(kappa):
        return 1.0, 0.0
    if kappa < 0:
        raise ValueError("Rician factor must be non-negative")
    return math.sqrt(kappa / (kappa + 1.0)), math.sqrt(1.0 / (kappa + 1.0))


def rician_channel(los: np.ndarray, kappa: float, root: CorrelationRoot | np.ndarray, g: np.ndarray) -> InterferenceChannel:
    matrix = root.matrix if isinstance(root, CorrelationRoot) else root
    wl, wn = rician_weights(kappa)
    nlos = matrix @ g
    return InterferenceChannel(wl * los + wn * nlos, los, nlos, kappa)


def los_probability(distance, config: SystemConfig | None = None):
    """Indoor-hotspot LOS probability versus horizontal distance (metres)."""
    d0 = 1.2 if config is None else config.los_d0
    d1 = 4.7 if config is None else config.los_d1
    d = np.asarray(distance, dtype=float)
    near = np.exp(-(d - d0) / d1)
    far = np.exp(-(d - _LOS_FAR_BREAK) / _LOS_FAR_DECAY) * _LOS_FAR_SCALE
    p = np.where(d <= d0, 1.0, np.where(d < _LOS_FAR_BREAK, near, far))
    return p if p.ndim else float(p)


def los_state(distance: float, u_los: float, kappa_normal: float, config: SystemConfig) -> float:
    """Rician factor for one pair from its two static uniform/normal draws.

    LOS with probability ``los_probability(distance)``; then kappa[dB] is
    ``mean + std * kappa_normal`` (or the fixed override). NLOS gives kappa = 0.
    """
    is_los = config.force_los or u_los < los_probability(distance, config)
    if not is_los:
        return 0.0
    kappa_db = config.kappa_db_fixed
    if kappa_db is None:
        kappa_db = config.kappa_mean_db + config.kappa_std_db * kappa_normal
    return 10.0 ** (kappa_db / 10.0)


def receiver_filter(h: np.ndarray, tau_sq: float, e: np.ndarray) -> np.ndarray:
    """Imperfect-CSI matched filter f = h + sqrt(tau^2 / (1 - tau^2)) e."""
    if not 0.0 <= tau_sq < 1.0:
        raise ConfigError("tau_sq must lie in [0, 1)", "tau_sq")
    return h + math.sqrt(tau_sq / (1.0 - tau_sq)) * e


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussians, E|x|^2 = 1."""
    shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(0.5)


class ChannelStatics:
    """Geometry-fixed channel quantities for a set of devices and their units.

    Per ordered pair (j, k) one uniform (LOS draw), one normal (kappa) and P
    angle pairs are drawn from ``rng`` in device-index order, for all pairs
    including the unused diagonal, so the draws do not depend on grouping.
    """

    def __init__(self, devices: list[Device], units: list[LisUnit], config: SystemConfig, rng: np.random.Generator):
        n = len(devices)
        self.config = config
        self.devices = devices
        self.units = units
        u_los = rng.random((n, n))
        k_norm = rng.standard_normal((n, n))
        theta = rng.uniform(-math.pi / 2, math.pi / 2, size=(n, n, config.paths, 2))
        self.theta = theta
        self.kappa = np.zeros((n, n))
        xy = np.array([d.position[:2] for d in devices]).reshape(n, 2)
        self.horizontal = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(-1))
        for j in range(n):
            for k in range(n):
                if j != k:
                    self.kappa[j, k] = los_state(self.horizontal[j, k], u_los[j, k], k_norm[j, k], config)
        self.kappa.setflags(write=False)
        self._desired = [los_channel(devices[k], units[k], config.wavelength) for k in range(n)]

    @property
    def n_devices(self) -> int:
        return len(self.devices)

    def desired(self, k: int) -> LosChannel:
        return self._desired[k]

    def paths(self, j: int, k: int) -> PathSet:
        return PathSet(self.theta[j, k, :, 0], self.theta[j, k, :, 1])

    def los(self, j: int, k: int) -> LosChannel:
        """LOS component h^L_jk of device j at unit k."""
        return los_channel(self.devices[j], self.units[k], self.config.wavelength)

    def root(self, j: int, k: int) -> CorrelationRoot:
        return correlation_root(self.devices[j], self.units[k], self.paths(j, k), self.config)

    def interference(self, j: int, k: int, g: np.ndarray) -> InterferenceChannel:
        return rician_channel(self.los(j, k).h, self.kappa[j, k], self.root(j, k), g)

    def projection_matrix(self, k: int, others) -> np.ndarray:
        """B_k = [h_kk | w_L h^L_jk ... | w_N R_jk^{1/2} ...] with shape (M, 1 + J + J P).

        ``(w^H B_k)`` gives every inner product the per-trial interference
        terms need; ``others`` fixes the interferer order.
        """
        cfg = self.config
        m, p = cfg.antennas, cfg.paths
        others = list(others)
        nj = len(others)
        b = np.empty((m, 1 + nj + nj * p), dtype=complex)
        b[:, 0] = self._desired[k].h
        for i, j in enumerate(others):
            wl, wn = rician_weights(self.kappa[j, k])
            b[:, 1 + i] = wl * self.los(j, k).h
            b[:, 1 + nj + i * p : 1 + nj + (i + 1) * p] = wn * self.root(j, k).matrix
        return b


def dump_channels(path: str | Path, statics: ChannelStatics, pairs=None, g: dict | None = None) -> None:
    """Write per-pair channel vectors as CSV rows ``j,k,m,re,im`` (antenna-major within a pair).

    Desired channels appear as j == k. Interference channels use the draws in
    ``g[(j, k)]`` when given, otherwise only their LOS component is written.
    """
    n = statics.n_devices
    if pairs is None:
        pairs = [(j, k) for k in range(n) for j in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["j", "k", "m", "re", "im"])
        for j, k in pairs:
            if j == k:
                h = statics.desired(k).h
            elif g is not None and (j, k) in g:
                h = statics.interference(j, k, g[(j, k)]).h
            else:
                h = statics.los(j, k).h
            for m, v in enumerate(h):
                w.writerow([j, k, m, repr(float(v.real)), repr(float(v.imag))])
