import math

import numpy as np


def prepare(B):
    return B


def unit_terms(h, B, e, g, tau_sq):
    """X, Y, Z at one unit for a batch of trials (BLAS path).

    h : (M,) desired channel; B : (M, 1 + J + J P) projection matrix
    e : (n, M) error draws; g : (n, J, P) NLOS fading of the J interferers
    """
    n, J, P = g.shape
    w = math.sqrt(1.0 - tau_sq) * h[None, :] + math.sqrt(tau_sq) * e
    U = w.conj() @ B
    t = U[:, 1 : 1 + J] + np.einsum("njp,njp->nj", U[:, 1 + J :].reshape(n, J, P), g)
    Y = t.real**2 + t.imag**2
    x = e.conj() @ h
    X = x.real**2 + x.imag**2
    Z = (w.real**2 + w.imag**2).sum(axis=1)
    return X, Y, Z
