"""Seeded Monte Carlo over fading draws and the empirical statistics compared
against the Gaussian sum-rate law."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels
from .asymptotics import SumRateDistribution, outage_probability
from .channel import complex_normal
from .config import SystemConfig
from .scenario import TRIAL_STREAM, Scenario

CHUNK = 128  # trials per work item; fixed so results do not depend on worker count


@dataclass(frozen=True)
class TrialRunSpec:
    trials: int
    seed: int
    group: int = 0
    workers: int = 1
    backend: str | None = None


def trial_rng(seed: int, group: int, trial: int) -> np.random.Generator:
    """Independent substream for one trial, keyed by (group, trial index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(TRIAL_STREAM, group, trial))
    return np.random.Generator(np.random.PCG64(ss))


def draw_trial(rng: np.random.Generator, K: int, M: int, P: int):
    """e (K, M) then g (K, K-1, P); ``g[k, i]`` drives the i-th interferer of unit k."""
    e = complex_normal(rng, (K, M))
    g = complex_normal(rng, (K, K - 1, P))
    return e, g


@dataclass
class TrialSamples:
    """Per-trial X_k, sum_j q_j Y_jk and Z_k, with q_j = rho_j / target SNR.

    Power control scales every rho with the target SNR, so these arrays give
    the rates at any target SNR from one set of draws.
    """

    X: np.ndarray
    Yq: np.ndarray
    Z: np.ndarray
    S: np.ndarray
    q: np.ndarray
    tau_sq: float
    target_snr: float
    rate_units: str = "nats"
    members: tuple = field(default_factory=tuple)

    @property
    def trials(self) -> int:
        return self.X.shape[0]

    def interference(self, target_snr: float | None = None) -> np.ndarray:
        snr = self.target_snr if target_snr is None else target_snr
        return snr * self.q * self.tau_sq * self.X + snr * self.Yq + self.Z

    def rates(self, target_snr: float | None = None) -> np.ndarray:
        snr = self.target_snr if target_snr is None else target_snr
        gamma = snr * self.q * self.S * (1.0 - self.tau_sq) / self.interference(snr)
        r = np.log1p(gamma)
        return r if self.rate_units == "nats" else r / math.log(2.0)

    def sum_rate(self, target_snr: float | None = None) -> np.ndarray:
        return self.rates(target_snr).sum(axis=1)


def _run_chunk(scenario: Scenario, group: int, start: int, stop: int, seed: int, backend):
    cfg = scenario.config
    members = scenario.members(group)
    K, M, P = len(members), cfg.antennas, cfg.paths
    n = stop - start
    e = np.empty((n, K, M), complex)
    g = np.empty((n, K, K - 1, P), complex)
    for i in range(n):
        e[i], g[i] = draw_trial(trial_rng(seed, group, start + i), K, M, P)
    q = scenario.power_weights(group)
    X = np.empty((n, K))
    Yq = np.empty((n, K))
    Z = np.empty((n, K))
    for kk, k in enumerate(members):
        h = scenario.statics.desired(k).h
        prepared = scenario.projection(k, group, backend)
        x, y, z = kernels.unit_terms(h, prepared, e[:, kk], g[:, kk], cfg.tau_sq, backend)
        X[:, kk] = x
        Yq[:, kk] = y @ np.delete(q, kk)
        Z[:, kk] = z
    return X, Yq, Z


_WORKER_SCENARIO: Scenario | None = None


def _init_worker(config: SystemConfig):
    global _WORKER_SCENARIO
    _WORKER_SCENARIO = Scenario(config)


def _worker_chunk(args):
    return _run_chunk(_WORKER_SCENARIO, *args)


def run_trials(scenario: Scenario, trials: int | None = None, seed: int | None = None, group: int = 0,
               workers: int = 1, backend: str | None = None) -> TrialSamples:
    """Monte Carlo sum-rate samples for one resource group.

    Trial t always uses the substream (seed, group, t), and work is split in
    fixed chunks of ``CHUNK`` trials, so the output is identical for any
    ``workers``.
    """
    cfg = scenario.config
    trials = cfg.trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    tasks = [(group, s, e, seed, backend) for s, e in bounds]
    if workers <= 1 or len(tasks) == 1:
        parts = [_run_chunk(scenario, *t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            parts = list(pool.map(_worker_chunk, tasks))
    X, Yq, Z = (np.concatenate([p[i] for p in parts]) for i in range(3))
    members = scenario.members(group)
    hh = np.array([np.vdot(scenario.statics.desired(k).h, scenario.statics.desired(k).h).real for k in members])
    return TrialSamples(X, Yq, Z, hh * hh, scenario.power_weights(group), cfg.tau_sq, cfg.target_snr,
                        cfg.rate_units, members)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray


def empirical_pdf(samples, bins: int = 50) -> Histogram:
    """Equal-width density histogram over [min, max]; one bin if all samples coincide."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples")
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return Histogram(np.array([lo, hi]), np.array([x.size]), np.array([math.inf]))
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    density = counts / (x.size * np.diff(edges))
    return Histogram(edges, counts, density)


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


def empirical_outage(samples, rate: float) -> tuple[float, float, float]:
    """Fraction of samples below ``rate`` with its Wilson 95% interval."""
    x = np.asarray(samples, dtype=float)
    if x.size < 1:
        raise ValueError("need at least one sample")
    hits = int(np.count_nonzero(x < rate))
    lo, hi = wilson_interval(hits, x.size)
    return hits / x.size, lo, hi


def normality_test(samples, mu: float, sigma2: float) -> float:
    """Kolmogorov-Smirnov distance between the sample ECDF and N(mu, sigma2)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 100:
        raise ValueError("normality test needs at least 100 samples")
    if sigma2 <= 0:
        # point mass at mu
        return float(max(np.count_nonzero(x < mu), np.count_nonzero(x > mu)) / x.size)
    return float(stats.kstest(x, "norm", args=(mu, math.sqrt(sigma2))).statistic)


@dataclass
class Comparison:
    mean_emp: float
    var_emp: float
    mean_asym: float
    var_asym: float
    ks: float
    outage: list  # (R_D, P_o_emp, lo, hi, P_o_asym)

    @property
    def mean_gap(self) -> float:
        return abs(self.mean_emp - self.mean_asym) / abs(self.mean_asym) if self.mean_asym else abs(self.mean_emp)

    @property
    def var_gap(self) -> float:
        return abs(self.var_emp - self.var_asym) / self.var_asym if self.var_asym else abs(self.var_emp)

    def flags(self, mean_tol: float = 0.02, ks_tol: float = 0.05) -> dict:
        return {"mean_ok": self.mean_gap <= mean_tol, "ks_ok": self.ks <= ks_tol}


def compare(dist: SumRateDistribution, samples, rates=()) -> Comparison:
    x = np.asarray(samples, dtype=float)
    rows = []
    for r in rates:
        p, lo, hi = empirical_outage(x, r)
        rows.append((float(r), p, lo, hi, outage_probability(dist, rate=r)))
    ks = normality_test(x, dist.mu, dist.sigma2) if x.size >= 100 else math.nan
    return Comparison(float(x.mean()), float(x.var(ddof=1)) if x.size > 1 else 0.0, dist.mu, dist.sigma2, ks, rows)
