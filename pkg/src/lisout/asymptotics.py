"""Deterministic equivalents: interference moments, rate linearisation,
Gaussian sum-rate law, outage probability and the Lyapunov diagnostic."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erfc, ndtr

from .channel import ChannelStatics, rician_weights

VARIANCE_MODES = ("exact", "independent")


@dataclass
class UnitAsymptotics:
    k: int
    p: float
    p_bar: float
    rho: float
    tau_sq: float
    mu_I: float
    sigma2_I: float
    a: float
    b: float
    # per interferer, in ``others`` order
    others: tuple[int, ...] = ()
    mu_L: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    s_L: np.ndarray = field(default_factory=lambda: np.zeros(0))
    s_N1: np.ndarray = field(default_factory=lambda: np.zeros(0))
    s_N2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    # Var[sum_j rho_j Y_jk] alone, the summand variance of the Lyapunov sum
    sigma2_Y: float = 0.0

    @property
    def s(self) -> np.ndarray:
        return self.s_L + self.s_N1 + self.s_N2

    @property
    def mu_Y(self) -> np.ndarray:
        return np.abs(self.mu_L) ** 2 + self.s

    @property
    def signal(self) -> float:
        return self.rho * self.p_bar * (1.0 - self.tau_sq)

    def linearised_rate(self, interference):
        """R_k(I) ~ a_k - b_k I."""
        return self.a - self.b * np.asarray(interference)


@dataclass
class SumRateDistribution:
    mu: float
    sigma2: float
    mean_terms: np.ndarray
    var_terms: np.ndarray
    units: str = "nats"

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass
class LyapunovDiagnostic:
    K: int
    s2: float
    numerator: float
    ratio: float


def p_bar(z: float, half_side: float, antennas: int) -> tuple[float, float]:
    """(p_k, p_bar_k): ||h_kk||^4 converges to p_bar_k = M^2 p_k^2 / (16 pi^2 L^4)."""
    if not (z > 0 and half_side > 0):
        raise ValueError("z and L must be positive")
    L2 = half_side * half_side
    p = math.atan(L2 / (z * math.sqrt(2.0 * L2 + z * z)))
    return p, antennas**2 * p * p / (16.0 * math.pi**2 * L2 * L2)


def _expect_product(F1, c1, F2, c2) -> float:
    """E[||c1 + F1^H e||^2 ||c2 + F2^H e||^2] for e ~ CN(0, I)."""
    tr1 = np.vdot(F1, F1).real
    tr2 = np.vdot(F2, F2).real
    cross = F1.conj().T @ F2
    l1 = F1 @ c1
    l2 = F2 @ c2
    k1 = np.vdot(c1, c1).real
    k2 = np.vdot(c2, c2).real
    return float(tr1 * tr2 + np.vdot(cross, cross).real + 2.0 * np.vdot(l1, l2).real + k1 * tr2 + k2 * tr1 + k1 * k2)


def interference_moments(statics: ChannelStatics, k: int, group, variance: str = "exact") -> UnitAsymptotics:
    """Mean and variance of I_k plus the per-interferer Y_jk moments.

    ``variance="independent"`` keeps only sum_j rho_j^2 (s^2 + 2 s |mu_L|^2),
    i.e. treats the Y_jk as independent Gaussian-driven terms and drops the
    estimation-error (X_k) and noise (Z_k) fluctuations.  ``"exact"`` is the
    closed-form Var[I_k] under the model: conditioning on e_k, the Y_jk are
    independent non-central chi-square variables, and E[I_k | e_k] is a
    Hermitian quadratic form in e_k.
    """
    if variance not in VARIANCE_MODES:
        raise ValueError(f"variance must be one of {VARIANCE_MODES}")
    cfg = statics.config
    tau2 = cfg.tau_sq
    tau = math.sqrt(tau2)
    dev = statics.devices[k]
    rho = dev.snr
    h = statics.desired(k).h
    hh = np.vdot(h, h).real
    M = h.shape[0]
    a_vec = math.sqrt(1.0 - tau2) * h  # mean of w_k = sqrt(1 - tau^2) h + tau e
    others = tuple(j for j in group if j != k)
    nj = len(others)
    mu_L = np.zeros(nj, complex)
    s_L, s_N1, s_N2 = np.zeros(nj), np.zeros(nj), np.zeros(nj)
    cond_var = 0.0
    cols, weights = [h], [rho]
    for i, j in enumerate(others):
        wl, wn = rician_weights(statics.kappa[j, k])
        ell = wl * statics.los(j, k).h
        Q = wn * statics.root(j, k).matrix
        ca = np.vdot(ell, a_vec)  # ell^H a
        cb = Q.conj().T @ a_vec
        mu_L[i] = np.conj(ca)  # sqrt(1 - tau^2) w_L h^H h^L
        s_L[i] = tau2 * np.vdot(ell, ell).real
        s_N1[i] = np.vdot(cb, cb).real
        s_N2[i] = tau2 * np.vdot(Q, Q).real
        rj = statics.devices[j].snr
        if variance == "exact":
            # E_e Var[Y | e] = E[v^2] + 2 E[|alpha|^2 v], alpha = ell^H w, v = ||Q^H w||^2
            Fb, Fa = tau * Q, tau * ell[:, None]
            e_v2 = _expect_product(Fb, cb, Fb, cb)
            e_av = _expect_product(Fa, np.array([ca]), Fb, cb)
            cond_var += rj * rj * (e_v2 + 2.0 * e_av)
            cols.append(ell[:, None])
            cols.append(Q)
            weights.extend([rj] * (1 + Q.shape[1]))
    rho_j = np.array([statics.devices[j].snr for j in others])
    mu_Y = np.abs(mu_L) ** 2 + s_L + s_N1 + s_N2
    mu_I = rho * tau2 * hh + float(np.dot(rho_j, mu_Y)) + (1.0 - tau2) * hh + tau2 * M
    if variance == "independent":
        s = s_L + s_N1 + s_N2
        sigma2 = float(np.sum(rho_j**2 * (s * s + 2.0 * s * np.abs(mu_L) ** 2)))
        sigma2_Y = sigma2
    else:
        # Var_e E[I | e]: E[I|e] = e^H A e + 2 Re(l^H e) + const with
        # A = tau^2 (B D B^H + I), l = tau (B' D B'^H a + a), B' without column h
        B = np.column_stack([c if c.ndim == 2 else c[:, None] for c in cols])
        d = np.asarray(weights)
        G = B.conj().T @ B
        sd = np.sqrt(d)
        GD = sd[:, None] * G * sd[None, :]
        d_lin = d.copy()
        d_lin[0] = 0.0  # X_k = |e^H h|^2 has no linear part
        BDBa = B @ (d_lin * (B.conj().T @ a_vec))
        tr_a2 = tau2 * tau2 * (np.vdot(GD, GD).real + 2.0 * float(np.dot(d, np.diag(G).real)) + M)
        lvec = tau * (BDBa + a_vec)
        sigma2 = float(tr_a2 + 2.0 * np.vdot(lvec, lvec).real + cond_var)
        # same decomposition restricted to the interferer columns
        GY = GD[1:, 1:]
        lY = tau * BDBa
        sigma2_Y = float(tau2 * tau2 * np.vdot(GY, GY).real + 2.0 * np.vdot(lY, lY).real + cond_var)
    p, pb = p_bar(dev.z, cfg.half_side, M)
    a, b = rate_linearisation(rho, tau2, pb, mu_I)
    return UnitAsymptotics(k, p, pb, rho, tau2, mu_I, sigma2, a, b, others, mu_L, s_L, s_N1, s_N2, sigma2_Y)


def rate_linearisation(rho: float, tau_sq: float, p_bar_k: float, mu_I: float) -> tuple[float, float]:
    """(a_k, b_k) of the first-order expansion R_k ~ a_k - b_k I_k around mu_I (nats)."""
    if not mu_I > 0:
        raise ValueError("mu_I must be positive")
    c = rho * p_bar_k * (1.0 - tau_sq)
    a = c / (c + mu_I) + math.log1p(c / mu_I)
    b = (c / mu_I) / (c + mu_I)
    return a, b


def sumrate_distribution(units: list[UnitAsymptotics], rate_units: str = "nats", order: int = 1) -> SumRateDistribution:
    """Gaussian law of the sum-rate from the linearised per-unit rates.

    ``order=2`` adds the curvature term sigma2_I/2 (1/mu_I^2 - 1/(c + mu_I)^2)
    to each mean; the variance is first order either way.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    scale = 1.0 if rate_units == "nats" else 1.0 / math.log(2.0)
    mean_terms = np.array([math.log1p(u.signal / u.mu_I) for u in units])
    if order == 2:
        mean_terms = mean_terms + np.array(
            [0.5 * u.sigma2_I * (1.0 / u.mu_I**2 - 1.0 / (u.mu_I + u.signal) ** 2) for u in units]
        )
    mean_terms = mean_terms * scale
    var_terms = np.array(
        [u.sigma2_I * u.signal**2 / (u.mu_I**2 * (u.mu_I + u.signal) ** 2) for u in units]
    ) * scale**2
    return SumRateDistribution(float(mean_terms.sum()), float(var_terms.sum()), mean_terms, var_terms, rate_units)


def q_function(x):
    """Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def outage_probability(dist: SumRateDistribution, rate: float | None = None, delta: float | None = None):
    """Pr[R < R_D] under the Gaussian law; give either ``rate`` (R_D) or ``delta`` (R_D = delta mu_R)."""
    if (rate is None) == (delta is None):
        raise ValueError("give exactly one of rate or delta")
    if rate is None:
        rate = delta * dist.mu
    if dist.sigma2 <= 0.0:
        return float(rate > dist.mu) if rate != dist.mu else 0.5
    if delta is not None:
        return float(q_function((1.0 - delta) * dist.mu / dist.sigma))
    # 1 - Q(x) == Q(-x); ndtr keeps precision in the lower tail
    return float(ndtr((rate - dist.mu) / dist.sigma))


def scaling_check(points, delta: float = 0.98, axis: str = "K") -> dict:
    """Tabulate mu_R, sigma_R, mu_R/sigma_R and P_o along a sweep.

    ``points`` is a sequence of (value, SumRateDistribution) ordered by the swept
    quantity. Along K the ratio mu_R/sigma_R should grow; along M the outage
    should not increase.
    """
    rows = []
    for value, dist in points:
        ratio = dist.mu / dist.sigma if dist.sigma > 0 else math.inf
        rows.append(
            {axis: value, "mu_R": dist.mu, "sigma_R": dist.sigma, "ratio": ratio,
             "P_o": outage_probability(dist, delta=delta)}
        )
    ratios = [r["ratio"] for r in rows]
    outs = [r["P_o"] for r in rows]
    sigmas = [r["sigma_R"] for r in rows]
    return {
        "rows": rows,
        "ratio_increasing": all(b > a for a, b in zip(ratios, ratios[1:])),
        "outage_nonincreasing": all(b <= a * (1 + 1e-12) + 1e-300 for a, b in zip(outs, outs[1:])),
        "sigma_nonincreasing": all(b <= a * (1 + 1e-12) for a, b in zip(sigmas, sigmas[1:])),
    }


def lyapunov_ratio(units: list[UnitAsymptotics], centred_interference: np.ndarray) -> LyapunovDiagnostic:
    """Lyapunov ratio with delta = 2.

    ``centred_interference[t, k]`` holds sum_j rho_j (Y_jk - mu_Y_jk) for trial t.
    s_K^2 uses the variance of that same sum (``sigma2_Y``), as the condition
    requires; the X_k and Z_k parts of Var[I_k] are not summands here.
    """
    K = len(units)
    if K < 2:
        raise ValueError("Lyapunov diagnostic needs K >= 2 interfering devices")
    b = np.array([u.b for u in units])
    s2 = float(np.sum(b**2 * np.array([u.sigma2_Y for u in units])))
    fourth = np.mean(centred_interference**4, axis=0)
    num = float(np.sum(b**4 * fourth))
    return LyapunovDiagnostic(K, s2, num, num / s2**2)


def write_report(path: str | Path, units: list[UnitAsymptotics], dist: SumRateDistribution, outage: float) -> None:
    """Per-unit CSV (k, p_k, p_bar, mu_I, sigma2_I, a, b) followed by a summary row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "p_k", "p_bar", "mu_I", "sigma2_I", "a", "b"])
        for u in units:
            w.writerow([u.k, repr(u.p), repr(u.p_bar), repr(u.mu_I), repr(u.sigma2_I), repr(u.a), repr(u.b)])
        w.writerow(["mu_R", "sigma_R", "P_o"])
        w.writerow([repr(dist.mu), repr(dist.sigma), repr(outage)])
