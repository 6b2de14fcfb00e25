"""Backend selection for the product kernels.

The compiled extension is used when it imports; setting the environment
variable ``POLYDENSITY_BACKEND=python`` forces the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("POLYDENSITY_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python' or None for default)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def _prep(inv, mult):
    inv = np.ascontiguousarray(inv, dtype=np.float64)
    mult = np.ascontiguousarray(mult, dtype=np.int64)
    return inv, mult


def prod_log_real(x, inv, mult, skip=None, backend=None):
    """``log|prod_k (1 - x inv_k)^mult_k|`` and its sign at real points ``x``."""
    x = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    inv, mult = _prep(inv, mult)
    if skip is None:
        skip = np.full(x.shape[0], -1, dtype=np.int64)
    skip = np.ascontiguousarray(skip, dtype=np.int64)
    return get_backend(backend).prod_log_real(x, inv, mult, skip)


def prod_log_complex(z, inv, mult, backend=None):
    """``log|prod|`` and ``arg(prod)`` at complex points ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    zr = np.ascontiguousarray(z.real)
    zi = np.ascontiguousarray(z.imag)
    inv, mult = _prep(inv, mult)
    return get_backend(backend).prod_log_complex(zr, zi, inv, mult)


def removed_factor_log(points_idx, zeros, mult, backend=None):
    """Products over all zeros except the one at ``points_idx``, evaluated at that zero."""
    zeros = np.asarray(zeros, dtype=np.float64)
    idx = np.asarray(points_idx, dtype=np.int64)
    return prod_log_real(zeros[idx], 1.0 / zeros, mult, skip=idx, backend=backend)
