# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: torus nearest-site search and co-channel SIR."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, INFINITY

cnp.import_array()


cdef inline double _wrap(double d, double L) nogil:
    d = fabs(d)
    if L - d < d:
        return L - d
    return d


def nearest_site(const double[:, ::1] points, const double[:, ::1] sites, double L):
    cdef Py_ssize_t n = points.shape[0], g = sites.shape[0]
    cdef Py_ssize_t i, j, best
    cdef double dx, dy, d2, best_d2
    idx = np.empty(n, dtype=np.int64)
    dist2 = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] idx_v = idx
    cdef double[::1] d2_v = dist2
    with nogil:
        for i in range(n):
            best = 0
            best_d2 = INFINITY
            for j in range(g):
                dx = _wrap(points[i, 0] - sites[j, 0], L)
                dy = _wrap(points[i, 1] - sites[j, 1], L)
                d2 = dx * dx + dy * dy
                if d2 < best_d2:
                    best_d2 = d2
                    best = j
            idx_v[i] = best
            d2_v[i] = best_d2
    return idx, dist2


def cochannel_sir(const double[:, ::1] devices, const cnp.int64_t[::1] order,
                  const cnp.int64_t[::1] bounds, const cnp.int64_t[::1] owner,
                  const double[:, ::1] gateways, const double[:, ::1] fades,
                  double L, double alpha):
    """SIR of every device at its serving gateway.

    ``order`` lists device indices grouped by channel; block ``c`` spans
    ``order[bounds[c]:bounds[c+1]]``.
    """
    cdef Py_ssize_t n = devices.shape[0], nb = bounds.shape[0] - 1
    cdef Py_ssize_t c, a, b, p, q, i, j, g
    cdef double dx, dy, sig, interf, pw
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] out_v = out
    with nogil:
        for c in range(nb):
            a = bounds[c]
            b = bounds[c + 1]
            for p in range(a, b):
                i = order[p]
                g = owner[i]
                sig = 0.0
                interf = 0.0
                for q in range(a, b):
                    j = order[q]
                    dx = _wrap(devices[j, 0] - gateways[g, 0], L)
                    dy = _wrap(devices[j, 1] - gateways[g, 1], L)
                    pw = fades[j, g] * pow(dx * dx + dy * dy, -0.5 * alpha)
                    if j == i:
                        sig = pw
                    else:
                        interf = interf + pw
                if interf == 0.0:
                    out_v[i] = INFINITY
                else:
                    out_v[i] = sig / interf
    return out
