import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lisout.channel import complex_normal
from lisout.rate import evaluate, instantaneous_rates, interference, quadratic_terms, sinr

from oracles import expanded_sinr


def _instance(rng, K, M):
    return complex_normal(rng, (K, M)), complex_normal(rng, (K, K, M)), complex_normal(rng, (K, M))


def test_perfect_csi(rng):
    h, hc, e = _instance(rng, 2, 4)
    t = quadratic_terms(h, hc, e, 0.0)
    np.testing.assert_allclose(t.Z, np.sum(np.abs(h) ** 2, axis=1))
    np.testing.assert_allclose(t.S, np.sum(np.abs(h) ** 2, axis=1) ** 2)


def test_self_interference_identity(rng):
    h, hc, e = _instance(rng, 2, 4)
    hc[1, 0] = h[0]
    t = quadratic_terms(h, hc, e, 0.0)
    assert t.Y[1, 0] == pytest.approx(t.S[0], rel=1e-13)
    assert t.Y[0, 0] == 0.0


def test_single_user_mf(rng):
    h, hc, e = _instance(rng, 1, 9)
    gamma = sinr(quadratic_terms(h, hc, e, 0.0), np.array([3.0]), 0.0)
    assert gamma[0] == pytest.approx(3.0 * np.sum(np.abs(h) ** 2), rel=1e-13)


def test_tau_to_one_kills_sinr(rng):
    h, hc, e = _instance(rng, 2, 4)
    g = sinr(quadratic_terms(h, hc, e, 1 - 1e-12), np.ones(2), 1 - 1e-12)
    assert np.all(g < 1e-9)


def test_dimension_mismatch(rng):
    h, hc, e = _instance(rng, 2, 4)
    with pytest.raises(ValueError):
        quadratic_terms(h, hc, e[:, :3], 0.5)


def test_zero_interference_guard():
    t = quadratic_terms(np.zeros((1, 1)), np.zeros((1, 1, 1)), np.zeros((1, 1)), 0.0)
    with pytest.raises(ZeroDivisionError):
        sinr(t, np.ones(1), 0.0)


def test_rate_units():
    assert instantaneous_rates([0.0])[0][0] == 0.0
    assert instantaneous_rates([math.e - 1])[0][0] == pytest.approx(1.0)
    assert instantaneous_rates([1.0], "bits")[0][0] == pytest.approx(1.0)
    r, total = instantaneous_rates([1.0, 2.0, 3.0])
    assert total == pytest.approx(r.sum())
    with pytest.raises(ValueError):
        instantaneous_rates([1.0], "nepers")


@pytest.mark.parametrize("M", [1, 4])
@pytest.mark.parametrize("K", [1, 2, 3])
def test_matches_direct_expansion(M, K):
    rng = np.random.default_rng(100 * M + K)
    worst = 0.0
    for _ in range(100):
        h, hc, e = _instance(rng, K, M)
        rho = rng.uniform(0.1, 20, K)
        tau2 = rng.uniform(0, 0.9)
        got = evaluate(h, hc, e, rho, tau2).gamma
        ref = expanded_sinr(h, hc, e, rho, tau2)
        worst = max(worst, np.max(np.abs(got - ref) / np.abs(ref)))
    assert worst <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), j=st.integers(1, 2), scale=st.floats(1.0, 100.0))
def test_more_interferer_power_never_helps(seed, j, scale):
    rng = np.random.default_rng(seed)
    h, hc, e = _instance(rng, 3, 4)
    rho = rng.uniform(0.1, 5, 3)
    t = quadratic_terms(h, hc, e, 0.4)
    before = sinr(t, rho, 0.4)[0]
    rho2 = rho.copy()
    rho2[j] *= scale
    after = rho[0] * t.S[0] * 0.6 / interference(t, rho2, 0.4)[0]
    assert after <= before * (1 + 1e-12)


def test_rates_finite_nonnegative(rng):
    for _ in range(50):
        h, hc, e = _instance(rng, 3, 4)
        t = evaluate(h, hc, e, rng.uniform(0, 10, 3), 0.5)
        assert np.all(t.R_k >= 0) and np.isfinite(t.R)
        assert min(t.S.min(), t.X.min(), t.Y.min(), t.Z.min(), t.I.min()) >= 0
