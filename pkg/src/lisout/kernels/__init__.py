"""Hot per-trial kernels.

Two interchangeable backends compute the same quantities: a numba-compiled
fused loop and a plain numpy/BLAS version. ``LISOUT_KERNEL=numpy`` (or
``numba``) selects one; by default numba is used when it imports.
"""
import os

from . import _numpy

BACKENDS = {"numpy": _numpy}

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba missing
    _numba = None
else:
    BACKENDS["numba"] = _numba


def _select(name=None):
    name = (name or os.environ.get("LISOUT_KERNEL", "")).strip().lower()
    if not name:
        name = "numba" if "numba" in BACKENDS else "numpy"
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}")
    return name


BACKEND = _select()


def get_backend(name=None):
    return BACKENDS[_select(name) if name else BACKEND]


def prepare(B, backend=None):
    """Backend-specific layout of a projection matrix (see ``ChannelStatics.projection_matrix``)."""
    return get_backend(backend).prepare(B)


def unit_terms(h, prepared, e, g, tau_sq, backend=None):
    """(X, Y, Z) for a batch of trials at one unit; ``prepared`` comes from :func:`prepare`."""
    return get_backend(backend).unit_terms(h, prepared, e, g, tau_sq)
