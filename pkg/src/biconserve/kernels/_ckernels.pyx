# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels.

Same stencils and formulas as ``_fallback``: second-order central
differences inside, second-order one-sided on the edges, nested for second
derivatives.  Loops are sequential so results are reproducible.
"""

import numpy as np
from libc.math cimport sqrt


cdef inline double _du(const double[:, ::1] f, Py_ssize_t i, Py_ssize_t j, Py_ssize_t n, double h) nogil:
    if i == 0:
        return (-1.5 / h) * f[0, j] + (2.0 / h) * f[1, j] + (-0.5 / h) * f[2, j]
    if i == n - 1:
        return (0.5 / h) * f[n - 3, j] + (-2.0 / h) * f[n - 2, j] + (1.5 / h) * f[n - 1, j]
    return (f[i + 1, j] - f[i - 1, j]) / (2.0 * h)


cdef inline double _ds(const double[:, ::1] f, Py_ssize_t i, Py_ssize_t j, Py_ssize_t n, double h) nogil:
    if j == 0:
        return (-1.5 / h) * f[i, 0] + (2.0 / h) * f[i, 1] + (-0.5 / h) * f[i, 2]
    if j == n - 1:
        return (0.5 / h) * f[i, n - 3] + (-2.0 / h) * f[i, n - 2] + (1.5 / h) * f[i, n - 1]
    return (f[i, j + 1] - f[i, j - 1]) / (2.0 * h)


cdef void _christoffels(const double[:, ::1] g11, const double[:, ::1] g12, const double[:, ::1] g22,
                        double hu, double hs, double[:, :, :, :, ::1] gam) nogil:
    cdef Py_ssize_t nu = g11.shape[0], ns = g11.shape[1], i, j
    cdef double e_u, f_u, g_u, e_s, f_s, g_s, det, i11, i12, i22
    cdef double f111, f112, f122, f211, f212, f222
    for i in range(nu):
        for j in range(ns):
            e_u = _du(g11, i, j, nu, hu)
            f_u = _du(g12, i, j, nu, hu)
            g_u = _du(g22, i, j, nu, hu)
            e_s = _ds(g11, i, j, ns, hs)
            f_s = _ds(g12, i, j, ns, hs)
            g_s = _ds(g22, i, j, ns, hs)
            # first kind Gamma_{l,ij}
            f111 = 0.5 * e_u
            f112 = 0.5 * e_s
            f122 = f_s - 0.5 * g_u
            f211 = f_u - 0.5 * e_s
            f212 = 0.5 * g_u
            f222 = 0.5 * g_s
            det = g11[i, j] * g22[i, j] - g12[i, j] * g12[i, j]
            i11 = g22[i, j] / det
            i12 = -g12[i, j] / det
            i22 = g11[i, j] / det
            gam[0, 0, 0, i, j] = i11 * f111 + i12 * f211
            gam[0, 0, 1, i, j] = i11 * f112 + i12 * f212
            gam[0, 1, 1, i, j] = i11 * f122 + i12 * f222
            gam[1, 0, 0, i, j] = i12 * f111 + i22 * f211
            gam[1, 0, 1, i, j] = i12 * f112 + i22 * f212
            gam[1, 1, 1, i, j] = i12 * f122 + i22 * f222
            gam[0, 1, 0, i, j] = gam[0, 0, 1, i, j]
            gam[1, 1, 0, i, j] = gam[1, 0, 1, i, j]


def christoffels(g11, g12, g22, double hu, double hs):
    cdef const double[:, ::1] a = np.ascontiguousarray(g11, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(g12, dtype=np.float64)
    cdef const double[:, ::1] c = np.ascontiguousarray(g22, dtype=np.float64)
    out = np.empty((2, 2, 2, a.shape[0], a.shape[1]))
    cdef double[:, :, :, :, ::1] gam = out
    with nogil:
        _christoffels(a, b, c, hu, hs, gam)
    return out


def gauss_curvature(g11, g12, g22, double hu, double hs):
    cdef const double[:, ::1] a = np.ascontiguousarray(g11, dtype=np.float64)
    gam_arr = christoffels(g11, g12, g22, hu, hs)
    cdef double[:, :, :, :, ::1] gam = gam_arr
    cdef double[:, ::1] g212 = np.ascontiguousarray(gam_arr[1, 0, 1])
    cdef double[:, ::1] g211 = np.ascontiguousarray(gam_arr[1, 0, 0])
    cdef Py_ssize_t nu = a.shape[0], ns = a.shape[1], i, j
    out = np.empty((nu, ns))
    cdef double[:, ::1] k = out
    cdef double bracket
    with nogil:
        for i in range(nu):
            for j in range(ns):
                bracket = (_du(g212, i, j, nu, hu) - _ds(g211, i, j, ns, hs)
                           + gam[0, 0, 1, i, j] * gam[1, 0, 0, i, j]
                           + gam[1, 0, 1, i, j] * gam[1, 0, 1, i, j]
                           - gam[1, 0, 0, i, j] * gam[1, 1, 1, i, j]
                           - gam[0, 0, 0, i, j] * gam[1, 0, 1, i, j])
                k[i, j] = -bracket / a[i, j]
    return out


def brioschi(g11, g12, g22, double hu, double hs):
    cdef const double[:, ::1] E = np.ascontiguousarray(g11, dtype=np.float64)
    cdef const double[:, ::1] F = np.ascontiguousarray(g12, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(g22, dtype=np.float64)
    cdef Py_ssize_t nu = E.shape[0], ns = E.shape[1], i, j
    d_arr = np.empty((6, nu, ns))
    cdef double[:, :, ::1] d = d_arr
    with nogil:
        for i in range(nu):
            for j in range(ns):
                d[0, i, j] = _du(E, i, j, nu, hu)
                d[1, i, j] = _ds(E, i, j, ns, hs)
                d[2, i, j] = _du(F, i, j, nu, hu)
                d[3, i, j] = _ds(F, i, j, ns, hs)
                d[4, i, j] = _du(G, i, j, nu, hu)
                d[5, i, j] = _ds(G, i, j, ns, hs)
    out = np.empty((nu, ns))
    cdef double[:, ::1] k = out
    cdef double[:, ::1] Ev = d_arr[1]
    cdef double[:, ::1] Fu = d_arr[2]
    cdef double[:, ::1] Gu = d_arr[4]
    cdef double a, b, c, dd, e, p, q, det1, det2, W
    cdef double e_, f_, g_
    with nogil:
        for i in range(nu):
            for j in range(ns):
                e_ = E[i, j]
                f_ = F[i, j]
                g_ = G[i, j]
                a = -0.5 * _ds(Ev, i, j, ns, hs) + _ds(Fu, i, j, ns, hs) - 0.5 * _du(Gu, i, j, nu, hu)
                b = 0.5 * d[0, i, j]
                c = d[2, i, j] - 0.5 * d[1, i, j]
                dd = d[3, i, j] - 0.5 * d[4, i, j]
                e = 0.5 * d[5, i, j]
                det1 = a * (e_ * g_ - f_ * f_) - b * (dd * g_ - f_ * e) + c * (dd * f_ - e_ * e)
                p = 0.5 * d[1, i, j]
                q = 0.5 * d[4, i, j]
                det2 = -p * (p * g_ - f_ * q) + q * (p * f_ - e_ * q)
                W = e_ * g_ - f_ * f_
                k[i, j] = (det1 - det2) / (W * W)
    return out


def laplace_beltrami(g11, g12, g22, f, double hu, double hs):
    cdef const double[:, ::1] E = np.ascontiguousarray(g11, dtype=np.float64)
    cdef const double[:, ::1] F = np.ascontiguousarray(g12, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(g22, dtype=np.float64)
    cdef const double[:, ::1] h = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t nu = E.shape[0], ns = E.shape[1], i, j
    flux_arr = np.empty((2, nu, ns))
    cdef double[:, :, ::1] flux = flux_arr
    out = np.empty((nu, ns))
    cdef double[:, ::1] lap = out
    cdef double fu, fs, root
    with nogil:
        for i in range(nu):
            for j in range(ns):
                fu = _du(h, i, j, nu, hu)
                fs = _ds(h, i, j, ns, hs)
                root = sqrt(E[i, j] * G[i, j] - F[i, j] * F[i, j])
                flux[0, i, j] = (G[i, j] * fu - F[i, j] * fs) / root
                flux[1, i, j] = (E[i, j] * fs - F[i, j] * fu) / root
    cdef double[:, ::1] flux_u = flux_arr[0]
    cdef double[:, ::1] flux_s = flux_arr[1]
    with nogil:
        for i in range(nu):
            for j in range(ns):
                root = sqrt(E[i, j] * G[i, j] - F[i, j] * F[i, j])
                lap[i, j] = -(_du(flux_u, i, j, nu, hu) + _ds(flux_s, i, j, ns, hs)) / root
    return out


def grad_norm_sq(g11, g12, g22, f, double hu, double hs):
    cdef const double[:, ::1] E = np.ascontiguousarray(g11, dtype=np.float64)
    cdef const double[:, ::1] F = np.ascontiguousarray(g12, dtype=np.float64)
    cdef const double[:, ::1] G = np.ascontiguousarray(g22, dtype=np.float64)
    cdef const double[:, ::1] h = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t nu = E.shape[0], ns = E.shape[1], i, j
    out = np.empty((nu, ns))
    cdef double[:, ::1] res = out
    cdef double fu, fs
    with nogil:
        for i in range(nu):
            for j in range(ns):
                fu = _du(h, i, j, nu, hu)
                fs = _ds(h, i, j, ns, hs)
                res[i, j] = ((G[i, j] * fu * fu - 2.0 * F[i, j] * fu * fs + E[i, j] * fs * fs)
                             / (E[i, j] * G[i, j] - F[i, j] * F[i, j]))
    return out
