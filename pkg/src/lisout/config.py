"""System configuration and its flat ``key = value`` file format."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Invalid or unreadable configuration. ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


RATE_UNITS = ("nats", "bits")

# file key -> dataclass field
_KEYS = {
    "lambda": "wavelength",
    "L": "half_side",
    "M": "antennas",
    "d_m": "spacing",
    "z": "height",
    "region_x": "region_x",
    "region_y": "region_y",
    "target_snr_db": "target_snr_db",
    "tau_sq": "tau_sq",
    "beta_pl": "beta_pl",
    "P": "paths",
    "trials": "trials",
    "seed": "seed",
    "rate_units": "rate_units",
    # LOS-probability / Rician-factor model constants
    "los_d0": "los_d0",
    "los_d1": "los_d1",
    "kappa_mean_db": "kappa_mean_db",
    "kappa_std_db": "kappa_std_db",
    "force_los": "force_los",
    "kappa_db_fixed": "kappa_db_fixed",
}
_FIELDS = {v: k for k, v in _KEYS.items()}


@dataclass(frozen=True)
class SystemConfig:
    """Scalar model parameters. Defaults are the reference evaluation setup."""

    wavelength: float = 0.1
    half_side: float = 0.25
    antennas: int = 100
    spacing: float = 1.0
    height: float = 1.0
    region_x: tuple[float, float] = (-2.0, 2.0)
    region_y: tuple[float, float] = (0.0, 4.0)
    target_snr_db: float = 3.0
    tau_sq: float = 0.5
    beta_pl: float = 3.7
    paths: int = 10
    trials: int = 10_000
    seed: int = 0
    rate_units: str = "nats"
    los_d0: float = 1.2
    los_d1: float = 4.7
    kappa_mean_db: float = 9.0
    kappa_std_db: float = 5.0
    force_los: bool = False
    kappa_db_fixed: float | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        side = math.isqrt(self.antennas) if self.antennas > 0 else 0
        if self.antennas < 1 or side * side != self.antennas:
            raise ConfigError(f"M={self.antennas} is not a positive perfect square", "M")
        if not self.wavelength > 0:
            raise ConfigError("lambda must be positive", "lambda")
        if not self.half_side > 0:
            raise ConfigError("L must be positive", "L")
        if not self.spacing > 0:
            raise ConfigError("d_m must be positive", "d_m")
        if not self.height > 0:
            raise ConfigError("z must be positive", "z")
        if not 0.0 <= self.tau_sq < 1.0:
            raise ConfigError("tau_sq must lie in [0, 1)", "tau_sq")
        if not self.beta_pl > 0:
            raise ConfigError("beta_pl must be positive", "beta_pl")
        if self.paths < 1:
            raise ConfigError("P must be >= 1", "P")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", "trials")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer", "seed")
        if self.rate_units not in RATE_UNITS:
            raise ConfigError(f"rate_units must be one of {RATE_UNITS}", "rate_units")
        for name, (lo, hi) in (("region_x", self.region_x), ("region_y", self.region_y)):
            if hi < lo:
                raise ConfigError(f"{name} is empty ({lo} > {hi})", name)
        if self.kappa_std_db < 0:
            raise ConfigError("kappa_std_db must be >= 0", "kappa_std_db")

    @property
    def side(self) -> int:
        return math.isqrt(self.antennas)

    @property
    def delta_l(self) -> float:
        """Antenna pitch: the sqrt(M) x sqrt(M) lattice exactly tiles the 2L x 2L unit."""
        return 2.0 * self.half_side / self.side

    @property
    def target_snr(self) -> float:
        return 10.0 ** (self.target_snr_db / 10.0)

    @property
    def log_base(self) -> float:
        return math.e if self.rate_units == "nats" else 2.0

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


def _parse_value(field: str, raw: str, half_side: float):
    raw = raw.strip()
    ftype = {f.name: f.type for f in dataclasses.fields(SystemConfig)}[field]
    if field in ("region_x", "region_y"):
        parts = [p for p in raw.replace("[", "").replace("]", "").replace(",", " ").split() if p]
        if len(parts) == 1:
            parts = parts * 2
        if len(parts) != 2:
            raise ValueError("expected two numbers")
        return (float(parts[0]), float(parts[1]))
    if field == "spacing" and raw.endswith("L"):
        # "4L" style spacing, in units of the unit half-side
        coef = raw[:-1].strip()
        return (float(coef) if coef else 1.0) * half_side
    if field == "rate_units":
        return raw
    if field == "force_los":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")
    if field == "kappa_db_fixed":
        return None if raw.lower() in ("", "none") else float(raw)
    if ftype == "int":
        try:
            return int(raw)
        except ValueError:
            pass  # accept "1e4"-style integers
        value = float(raw)
        if not value.is_integer():
            raise ValueError("expected an integer")
        return int(value)
    return float(raw)


def parse_config(text: str) -> SystemConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Missing keys take defaults."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else (":" if ":" in line else None)
        if sep is None:
            raise ConfigError(f"line {lineno}: expected 'key = value'", None)
        key, value = (s.strip() for s in line.split(sep, 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", key)
        raw[key] = value

    half_side = SystemConfig.half_side
    if "L" in raw:
        try:
            half_side = float(raw["L"])
        except ValueError:
            raise ConfigError(f"bad value for L: {raw['L']!r}", "L") from None

    values = {}
    for key, value in raw.items():
        field = _KEYS[key]
        try:
            values[field] = _parse_value(field, value, half_side)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})", key) from None
    return SystemConfig(**values)


def load_config(path: str | Path) -> SystemConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def format_config(config: SystemConfig) -> str:
    """Inverse of :func:`parse_config` (floats written with ``repr`` so they round-trip)."""
    lines = []
    for f in dataclasses.fields(SystemConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            text = f"{value[0]!r}, {value[1]!r}"
        elif value is None:
            text = "none"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{_FIELDS[f.name]} = {text}")
    return "\n".join(lines) + "\n"
