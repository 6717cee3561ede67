import math
import os
import subprocess
import sys

import numpy as np
import pytest

from lisout import kernels
from lisout.channel import complex_normal


def _reference(h, B, e, g, tau_sq):
    n, J, P = g.shape
    X, Y, Z = np.empty(n), np.empty((n, J)), np.empty(n)
    for i in range(n):
        w = math.sqrt(1 - tau_sq) * h + math.sqrt(tau_sq) * e[i]
        X[i] = abs(np.vdot(e[i], h)) ** 2
        Z[i] = np.vdot(w, w).real
        for j in range(J):
            hjk = B[:, 1 + j] + B[:, 1 + J + j * P: 1 + J + (j + 1) * P] @ g[i, j]
            Y[i, j] = abs(np.vdot(w, hjk)) ** 2
    return X, Y, Z


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
@pytest.mark.parametrize("n,M,J,P", [(1, 1, 1, 1), (7, 16, 3, 4), (9, 25, 5, 2)])
def test_unit_terms_match_reference(backend, n, M, J, P, rng):
    h = complex_normal(rng, M)
    B = complex_normal(rng, (M, 1 + J + J * P))
    B[:, 0] = h
    e = complex_normal(rng, (n, M))
    g = complex_normal(rng, (n, J, P))
    got = kernels.unit_terms(h, kernels.prepare(B, backend), e, g, 0.37, backend)
    for a, b in zip(got, _reference(h, B, e, g, 0.37)):
        np.testing.assert_allclose(a, b, rtol=1e-11)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_env_flag_selects_backend(name):
    env = dict(os.environ, LISOUT_KERNEL=name)
    out = subprocess.run([sys.executable, "-c", "from lisout import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == name
