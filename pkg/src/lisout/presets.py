"""Experiment presets (the evaluation sweeps) and their result tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import outage_probability
from .config import SystemConfig
from .scenario import Scenario
from .simulation import empirical_outage, empirical_pdf, normality_test, run_trials

PRESETS = ("fig2", "fig3", "fig4", "fig5", "custom")
DELTA = 0.98
FIG3_SNR_DB = tuple(np.round(np.arange(0.0, 4.0001, 0.25), 2).tolist())
FIG3_ANTENNAS = (100, 1600)
FIG4_ANTENNAS = (64, 100, 256, 400, 1024, 1600)
FIG5_DEVICES = (4, 9, 16, 25, 36, 49, 64, 81)
FIG5_AREA = 16.0

RESULT_COLUMNS = (
    "scenario", "M", "K", "snr_db", "mu_R_emp", "var_R_emp", "mu_R_asym", "var_R_asym",
    "ks", "R_D", "P_o_emp", "P_o_lo", "P_o_hi", "P_o_asym",
)
HIST_COLUMNS = ("scenario", "bin_lo", "bin_hi", "count", "density", "gauss_pdf")
SAMPLE_COLUMNS = ("trial", "R")


@dataclass(frozen=True)
class SweepPoint:
    scenario: str
    config: SystemConfig
    snr_db: tuple[float, ...] = ()
    delta: float = DELTA
    monte_carlo: bool = True


@dataclass
class PresetResult:
    """Tables keyed by name; each is (columns, rows)."""

    name: str
    tables: dict = field(default_factory=dict)
    configs: dict = field(default_factory=dict)

    def add_rows(self, table: str, columns, rows):
        cols, existing = self.tables.setdefault(table, (tuple(columns), []))
        existing.extend(rows)


def fixed_area_config(base: SystemConfig, devices: int, area: float = FIG5_AREA) -> SystemConfig:
    """K units tiling a square of the given area, one device centred above each."""
    n = math.isqrt(devices)
    if n * n != devices:
        raise ValueError("fixed-area sweep needs a square device count")
    width = math.sqrt(area)
    half = width / (2 * n)
    x0 = -width / 2
    return base.replace(
        half_side=half, spacing=2 * half,
        region_x=(x0 + half, x0 + width - half), region_y=(half, width - half),
    )


def sweep(name: str, base: SystemConfig) -> list[SweepPoint]:
    L = base.half_side
    if name == "custom":
        return [SweepPoint("custom", base, (base.target_snr_db,))]
    if name == "fig2":
        pts = []
        for M, mult in ((100, 8), (400, 2)):
            cfg = base.replace(antennas=M, spacing=mult * L)
            pts.append(SweepPoint(f"M{M}_dm{mult}L", cfg, (base.target_snr_db,)))
        return pts
    if name == "fig3":
        return [SweepPoint(f"M{M}_dm4L", base.replace(antennas=M, spacing=4 * L), FIG3_SNR_DB)
                for M in FIG3_ANTENNAS]
    if name == "fig4":
        return [SweepPoint(f"M{M}_dm{mult}L", base.replace(antennas=M, spacing=mult * L), (base.target_snr_db,),
                           monte_carlo=False)
                for mult in (2, 4, 8) for M in FIG4_ANTENNAS]
    if name == "fig5":
        return [SweepPoint(f"K{K}_A16", fixed_area_config(base, K), (base.target_snr_db,), monte_carlo=False)
                for K in FIG5_DEVICES]
    raise KeyError(name)


def _row(point, scenario, snr_db, dist, rate, samples=None):
    row = {
        "scenario": point.scenario, "M": point.config.antennas, "K": scenario.K, "snr_db": snr_db,
        "mu_R_emp": math.nan, "var_R_emp": math.nan, "mu_R_asym": dist.mu, "var_R_asym": dist.sigma2,
        "ks": math.nan, "R_D": rate, "P_o_emp": math.nan, "P_o_lo": math.nan, "P_o_hi": math.nan,
        "P_o_asym": outage_probability(dist, rate=rate),
    }
    if samples is not None:
        p, lo, hi = empirical_outage(samples, rate)
        row.update(mu_R_emp=float(samples.mean()), var_R_emp=float(samples.var(ddof=1)),
                   ks=normality_test(samples, dist.mu, dist.sigma2) if samples.size >= 100 else math.nan,
                   P_o_emp=p, P_o_lo=lo, P_o_hi=hi)
    return [row[c] for c in RESULT_COLUMNS]


def run_preset(name: str, base: SystemConfig, workers: int = 1, trials: int | None = None) -> PresetResult:
    """Evaluate every sweep point of a preset.

    fig3 fixes R_D at the closed-form mean at 0 dB for each (M, d_m) and reads
    all SNR points off one set of fading draws; fig4 and fig5 are closed form.
    """
    if name not in PRESETS:
        raise KeyError(name)
    result = PresetResult(name)
    trials = base.trials if trials is None else trials
    points = sweep(name, base)
    for point in points:
        result.configs[point.scenario] = point.config
        scen = Scenario(point.config)
        ts = run_trials(scen, trials, point.config.seed, workers=workers) if point.monte_carlo else None
        if name == "fig3":
            anchor = scen.with_target_snr(0.0).distribution().mu
            rows = []
            for snr_db in point.snr_db:
                dist = scen.with_target_snr(snr_db).distribution()
                samples = ts.sum_rate(10.0 ** (snr_db / 10.0))
                rows.append(_row(point, scen, snr_db, dist, anchor, samples))
            result.add_rows("results", RESULT_COLUMNS, rows)
            continue
        dist = scen.distribution()
        samples = ts.sum_rate() if ts is not None else None
        result.add_rows("results", RESULT_COLUMNS,
                        [_row(point, scen, point.config.target_snr_db, dist, point.delta * dist.mu, samples)])
        if samples is not None:
            table = "samples" if len(points) == 1 else f"samples_{point.scenario}"
            result.add_rows(table, SAMPLE_COLUMNS,
                            [[i, float(r)] for i, r in enumerate(samples)])
            if name == "fig2":
                result.add_rows("histograms", HIST_COLUMNS, _histogram_rows(point.scenario, samples, dist))
    return result


def _histogram_rows(scenario, samples, dist, bins: int = 50):
    hist = empirical_pdf(samples, bins)
    centres = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    if dist.sigma2 > 0:
        pdf = np.exp(-0.5 * ((centres - dist.mu) / dist.sigma) ** 2) / (dist.sigma * math.sqrt(2 * math.pi))
    else:
        pdf = np.full(centres.shape, math.nan)
    return [[scenario, float(lo), float(hi), int(c), float(d), float(g)]
            for lo, hi, c, d, g in zip(hist.edges[:-1], hist.edges[1:], hist.counts, hist.density, pdf)]
