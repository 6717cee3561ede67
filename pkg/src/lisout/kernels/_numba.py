import math

import numpy as np
from numba import njit


def prepare(B):
    return np.ascontiguousarray(B, dtype=np.complex128)


def unit_terms(h, B, e, g, tau_sq):
    return _unit_terms(np.ascontiguousarray(h), B, np.ascontiguousarray(e), np.ascontiguousarray(g), tau_sq)


@njit(cache=True)
def _unit_terms(h, B, e, g, tau_sq):
    # one pass builds conj(w), X and Z; the projection goes to BLAS via np.dot,
    # then the NLOS contraction and |.|^2 are fused per trial
    n, M = e.shape
    J = g.shape[1]
    P = g.shape[2]
    a = math.sqrt(1.0 - tau_sq)
    t = math.sqrt(tau_sq)
    W = np.empty((n, M), np.complex128)
    X = np.empty(n)
    Z = np.empty(n)
    for i in range(n):
        xr = 0.0
        xi = 0.0
        zs = 0.0
        for m in range(M):
            ev = e[i, m]
            hv = h[m]
            w = a * hv + t * ev
            W[i, m] = w.conjugate()
            x = ev.conjugate() * hv
            xr += x.real
            xi += x.imag
            zs += w.real * w.real + w.imag * w.imag
        X[i] = xr * xr + xi * xi
        Z[i] = zs
    U = np.dot(W, B)
    Y = np.empty((n, J))
    for i in range(n):
        for j in range(J):
            acc = U[i, 1 + j]
            base = 1 + J + j * P
            for p in range(P):
                acc += U[i, base + p] * g[i, j, p]
            Y[i, j] = acc.real * acc.real + acc.imag * acc.imag
    return X, Y, Z
