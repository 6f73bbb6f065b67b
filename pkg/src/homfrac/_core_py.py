"""Pure numpy fallback for the compiled stencil kernels in ``_core.pyx``.

Same contract, any dimension.  For a lattice point ``i`` the stencil window
aligned with the grid is ``weights[..., i:i+N][::-1]``: offset ``k = i - c + N - 1``
runs backwards as the cell index ``c`` runs forwards.
"""

import numpy as np


def binned_stencil_sums(weights, bins, f, points, nbins):
    m = weights.shape[0]
    shape = f.shape
    out = np.zeros((len(points), m, nbins))
    nonzero = f != 0.0
    fz = f[nonzero]
    for p, idx in enumerate(points):
        window = tuple(slice(i, i + s) for i, s in zip(idx, shape))
        flip = (slice(None, None, -1),) * len(shape)
        b = bins[window][flip][nonzero]
        keep = b >= 0
        b = b[keep]
        fv = fz[keep]
        for k in range(m):
            w = weights[(k,) + window][flip][nonzero][keep]
            out[p, k] = np.bincount(b, weights=w * fv, minlength=nbins)
    return out


def binned_stencil_sums_2d(weights, bins, f, points, nbins):
    return binned_stencil_sums(weights, bins, f, points, nbins)


def binned_stencil_sums_3d(weights, bins, f, points, nbins):
    return binned_stencil_sums(weights, bins, f, points, nbins)
