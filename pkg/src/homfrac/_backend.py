"""Selects the compiled stencil core when available.

Set ``HOMFRAC_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _core_py

BACKEND = "python"
_impl = _core_py

if os.environ.get("HOMFRAC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "cython"


def binned_stencil_sums(weights, bins, f, points, nbins, impl=None):
    """Per-point, per-channel, per-bin sums of ``weights[k][i - c] * f[c]``.

    ``weights`` has shape ``(m, 2N_0-1, ..., 2N_{n-1}-1)``, ``bins`` the
    stencil shape (negative entries are skipped), ``f`` shape ``(N_0, ...)``
    and ``points`` is an ``(P, n)`` array of lattice indices.  Returns an
    array of shape ``(P, m, nbins)``.
    """
    impl = _impl if impl is None else impl
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    bins = np.ascontiguousarray(bins, dtype=np.intc)
    f = np.ascontiguousarray(f, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.int64).reshape(-1, f.ndim)
    if f.ndim == 2:
        return impl.binned_stencil_sums_2d(weights, bins, f, points, int(nbins))
    if f.ndim == 3:
        return impl.binned_stencil_sums_3d(weights, bins, f, points, int(nbins))
    return _core_py.binned_stencil_sums(weights, bins, f, points, int(nbins))
