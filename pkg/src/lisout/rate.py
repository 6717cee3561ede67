"""Per-realisation SINR terms and instantaneous rates of the MF uplink."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class RealizationTerms:
    """One trial's quadratic terms for K units.

    ``Y[j, k]`` is the interference term of device j at unit k (diagonal is 0).
    """

    S: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    I: np.ndarray | None = None
    gamma: np.ndarray | None = None
    R_k: np.ndarray | None = None
    R: float | None = None


def quadratic_terms(h_desired: np.ndarray, h_cross: np.ndarray, e: np.ndarray, tau_sq: float) -> RealizationTerms:
    """S, X, Y, Z from explicit channel vectors.

    h_desired : (K, M), row k is h_kk
    h_cross : (K, K, M), ``h_cross[j, k]`` is h_jk (diagonal ignored)
    e : (K, M) estimation-error draws
    """
    h_desired = np.atleast_2d(h_desired)
    e = np.atleast_2d(e)
    K, M = h_desired.shape
    if e.shape != (K, M) or h_cross.shape != (K, K, M):
        raise ValueError(f"dimension mismatch: h {h_desired.shape}, e {e.shape}, cross {h_cross.shape}")
    a, t = math.sqrt(1.0 - tau_sq), math.sqrt(tau_sq)
    w = a * h_desired + t * e  # scaled MF combiner, sqrt(1 - tau^2) f_k
    hh = np.einsum("km,km->k", h_desired.conj(), h_desired).real
    S = hh * hh
    X = np.abs(np.einsum("km,km->k", e.conj(), h_desired)) ** 2
    Y = np.abs(np.einsum("km,jkm->jk", w.conj(), h_cross)) ** 2
    Y[np.diag_indices(K)] = 0.0
    Z = np.einsum("km,km->k", w.conj(), w).real
    return RealizationTerms(S, X, Y, Z)


def interference(terms: RealizationTerms, rho: np.ndarray, tau_sq: float) -> np.ndarray:
    """I_k = rho_k tau^2 X_k + sum_{j != k} rho_j Y_jk + Z_k."""
    rho = np.asarray(rho, dtype=float)
    return rho * tau_sq * terms.X + rho @ terms.Y + terms.Z


def sinr(terms: RealizationTerms, rho: np.ndarray, tau_sq: float) -> np.ndarray:
    I = interference(terms, rho, tau_sq)
    if np.any(I <= 0):
        raise ZeroDivisionError("interference-plus-noise power is zero")
    terms.I = I
    return np.asarray(rho) * terms.S * (1.0 - tau_sq) / I


def instantaneous_rates(gamma, units: str = "nats"):
    """(R_k, R) with R_k = log(1 + gamma_k) in nats or bits."""
    r = np.log1p(np.asarray(gamma, dtype=float))
    if units == "bits":
        r = r / math.log(2.0)
    elif units != "nats":
        raise ValueError(f"unknown rate units {units!r}")
    return r, float(r.sum())


def evaluate(h_desired, h_cross, e, rho, tau_sq: float, units: str = "nats") -> RealizationTerms:
    """Full pipeline for one realisation: terms, SINR, rates."""
    terms = quadratic_terms(h_desired, h_cross, e, tau_sq)
    terms.gamma = sinr(terms, rho, tau_sq)
    terms.R_k, terms.R = instantaneous_rates(terms.gamma, units)
    return terms
