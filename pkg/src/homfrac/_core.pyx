# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels.

Every operator in the package reduces to one primitive: for a lattice point
``i`` and a translation-invariant stencil ``W[k]`` indexed by the cell offset
``k = i - c``, accumulate ``W[k] * f[c]`` into the bin ``bins[k]``.  Shells of
the dyadic decomposition and radial ramp bins of the maximal operators are both
just bin maps.  Cells are visited in C order, so each bin is summed in the same
order as ``numpy.bincount`` over the raveled grid.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def binned_stencil_sums_2d(const double[:, :, ::1] weights,
                           const int[:, ::1] bins,
                           const double[:, ::1] f,
                           const cnp.int64_t[:, ::1] points,
                           int nbins):
    cdef Py_ssize_t m = weights.shape[0]
    cdef Py_ssize_t n0 = f.shape[0], n1 = f.shape[1]
    cdef Py_ssize_t npts = points.shape[0]
    out_arr = np.zeros((npts, m, nbins), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t p, c0, c1, o0, o1, k, i0, i1
    cdef int b
    cdef double v
    for p in range(npts):
        i0 = points[p, 0]
        i1 = points[p, 1]
        for c0 in range(n0):
            o0 = i0 - c0 + n0 - 1
            for c1 in range(n1):
                v = f[c0, c1]
                if v == 0.0:
                    continue
                o1 = i1 - c1 + n1 - 1
                b = bins[o0, o1]
                if b < 0:
                    continue
                for k in range(m):
                    out[p, k, b] += weights[k, o0, o1] * v
    return out_arr


def binned_stencil_sums_3d(const double[:, :, :, ::1] weights,
                           const int[:, :, ::1] bins,
                           const double[:, :, ::1] f,
                           const cnp.int64_t[:, ::1] points,
                           int nbins):
    cdef Py_ssize_t m = weights.shape[0]
    cdef Py_ssize_t n0 = f.shape[0], n1 = f.shape[1], n2 = f.shape[2]
    cdef Py_ssize_t npts = points.shape[0]
    out_arr = np.zeros((npts, m, nbins), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t p, c0, c1, c2, o0, o1, o2, k, i0, i1, i2
    cdef int b
    cdef double v
    for p in range(npts):
        i0 = points[p, 0]
        i1 = points[p, 1]
        i2 = points[p, 2]
        for c0 in range(n0):
            o0 = i0 - c0 + n0 - 1
            for c1 in range(n1):
                o1 = i1 - c1 + n1 - 1
                for c2 in range(n2):
                    v = f[c0, c1, c2]
                    if v == 0.0:
                        continue
                    o2 = i2 - c2 + n2 - 1
                    b = bins[o0, o1, o2]
                    if b < 0:
                        continue
                    for k in range(m):
                        out[p, k, b] += weights[k, o0, o1, o2] * v
    return out_arr
