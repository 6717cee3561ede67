"""A configured LIS deployment: geometry, channel statics and cached per-unit data."""
from __future__ import annotations

import numpy as np

from . import kernels
from .asymptotics import SumRateDistribution, UnitAsymptotics, interference_moments, sumrate_distribution
from .channel import ChannelStatics
from .config import SystemConfig
from .geometry import assign_resource_groups, build_device_grid, build_lis_unit, set_transmit_power

# SeedSequence spawn-key roots; per-trial keys are (TRIAL_STREAM, group, trial)
STATICS_STREAM = 0
TRIAL_STREAM = 1

PROJECTION_CACHE_BYTES = 2 * 1024**3


def statics_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(STATICS_STREAM,))))


class Scenario:
    def __init__(self, config: SystemConfig, devices=None):
        self.config = config
        self.devices = build_device_grid(config) if devices is None else list(devices)
        self.units = [build_lis_unit(d, config) for d in self.devices]
        self.groups = assign_resource_groups(self.units)
        self.statics = ChannelStatics(self.devices, self.units, config, statics_rng(config.seed))
        self._asym: dict = {}
        self._proj: dict = {}
        self._proj_bytes = 0

    @property
    def K(self) -> int:
        return len(self.devices)

    def members(self, group: int = 0) -> tuple[int, ...]:
        return self.groups.groups[group]

    def power_weights(self, group: int = 0) -> np.ndarray:
        """rho_k per unit target SNR, i.e. 4 pi z_k^2."""
        return np.array([set_transmit_power(self.devices[k], 1.0) for k in self.members(group)])

    def with_target_snr(self, snr_db: float) -> "Scenario":
        """Same deployment and channel statics at another target SNR."""
        return Scenario(self.config.replace(target_snr_db=snr_db))

    def unit_asymptotics(self, group: int = 0, variance: str = "exact") -> list[UnitAsymptotics]:
        key = (group, variance)
        if key not in self._asym:
            members = self.members(group)
            self._asym[key] = [interference_moments(self.statics, k, members, variance) for k in members]
        return self._asym[key]

    def distribution(self, group: int = 0, variance: str = "exact", order: int = 1) -> SumRateDistribution:
        return sumrate_distribution(self.unit_asymptotics(group, variance), self.config.rate_units, order)

    def projection(self, k: int, group: int = 0, backend=None):
        """Backend-prepared projection matrix of unit k against the rest of its group."""
        name = kernels._select(backend)
        key = (name, k, group)
        hit = self._proj.get(key)
        if hit is not None:
            return hit
        others = [j for j in self.members(group) if j != k]
        prepared = kernels.prepare(self.statics.projection_matrix(k, others), name)
        size = sum(a.nbytes for a in (prepared if isinstance(prepared, tuple) else (prepared,)))
        if self._proj_bytes + size <= PROJECTION_CACHE_BYTES:
            self._proj[key] = prepared
            self._proj_bytes += size
        return prepared
