"""Pointwise formulas of surface geometry in a coordinate chart.

Everything here is algebra on already-differentiated data and vectorizes
over numpy arrays.  The finite-difference kernels and the exact-derivative
fixtures both feed these, so the two paths differ only in where the
derivatives come from.

Index convention: coordinate 0 is u, coordinate 1 is s (or v).  Christoffel
arrays are indexed ``gam[k, i, j]`` for Gamma^k_ij.
"""

import numpy as np


def metric_matrix(g11, g12, g22):
    return ((g11, g12), (g12, g22))


def inverse_metric(g11, g12, g22):
    det = g11 * g22 - g12 * g12
    return ((g22 / det, -g12 / det), (-g12 / det, g11 / det))


def christoffel_first_kind(dg):
    """Gamma_{l,ij} = (d_j g_li + d_i g_lj - d_l g_ij) / 2.

    ``dg[m]`` is the triple (d_m g11, d_m g12, d_m g22).
    """
    def d(m, i, j):
        a, b, c = dg[m]
        return a if i == j == 0 else (c if i == j == 1 else b)

    return [[[0.5 * (d(j, l, i) + d(i, l, j) - d(l, i, j)) for j in range(2)]
             for i in range(2)] for l in range(2)]


def christoffel_symbols(g11, g12, g22, dg):
    """Gamma^k_ij as an array of shape (2, 2, 2, *grid)."""
    ginv = inverse_metric(g11, g12, g22)
    first = christoffel_first_kind(dg)
    gam = [[[ginv[k][0] * first[0][i][j] + ginv[k][1] * first[1][i][j] for j in range(2)]
            for i in range(2)] for k in range(2)]
    return np.array(np.broadcast_arrays(*[gam[k][i][j] for k in range(2) for i in range(2)
                                          for j in range(2)])).reshape((2, 2, 2) + np.shape(g11))


def christoffel_derivatives(g11, g12, g22, dg, ddg):
    """d_m Gamma^k_ij, shape (2, 2, 2, 2, *grid) indexed [m, k, i, j].

    ``ddg[m][n]`` is the triple of second derivatives d_m d_n (g11, g12, g22).
    """
    ginv = inverse_metric(g11, g12, g22)
    first = christoffel_first_kind(dg)
    out = []
    for m in range(2):
        # d_m g^{-1} = -g^{-1} (d_m g) g^{-1}
        dgm = metric_matrix(*dg[m])
        dginv = [[-sum(ginv[k][a] * dgm[a][b] * ginv[b][l] for a in range(2) for b in range(2))
                  for l in range(2)] for k in range(2)]
        dfirst = christoffel_first_kind([ddg[m][0], ddg[m][1]])
        out.append([[[dginv[k][0] * first[0][i][j] + dginv[k][1] * first[1][i][j]
                      + ginv[k][0] * dfirst[0][i][j] + ginv[k][1] * dfirst[1][i][j]
                      for j in range(2)] for i in range(2)] for k in range(2)])
    flat = [out[m][k][i][j] for m in range(2) for k in range(2) for i in range(2) for j in range(2)]
    return np.array(np.broadcast_arrays(*flat)).reshape((2, 2, 2, 2) + np.shape(g11))


def gauss_equation_curvature(g11, gam, dgam212_du, dgam211_ds):
    """K from the Gauss equation written with Christoffel symbols:

    -g11 K = (G^2_12)_u - (G^2_11)_s + G^1_12 G^2_11 + G^2_12 G^2_12
             - G^2_11 G^2_22 - G^1_11 G^2_12
    """
    bracket = (dgam212_du - dgam211_ds
               + gam[0, 0, 1] * gam[1, 0, 0]
               + gam[1, 0, 1] * gam[1, 0, 1]
               - gam[1, 0, 0] * gam[1, 1, 1]
               - gam[0, 0, 0] * gam[1, 0, 1])
    return -bracket / g11


def brioschi_curvature(E, F, G, Eu, Ev, Fu, Fv, Gu, Gv, Evv, Fuv, Guu):
    """Brioschi's determinant formula for K in terms of E, F, G."""
    a = -0.5 * Evv + Fuv - 0.5 * Guu
    b, c = 0.5 * Eu, Fu - 0.5 * Ev
    d, e = Fv - 0.5 * Gu, 0.5 * Gv
    det1 = a * (E * G - F * F) - b * (d * G - F * e) + c * (d * F - E * e)
    p, q = 0.5 * Ev, 0.5 * Gu
    det2 = -p * (p * G - F * q) + q * (p * F - E * q)
    return (det1 - det2) / (E * G - F * F) ** 2


def covariant_derivative(v, dv, w, gam):
    """(nabla_V W)^k = V^i d_i W^k + Gamma^k_ij V^i W^j.

    ``v``, ``w`` are pairs of component arrays; ``dv[i][k]`` is d_i W^k (the
    derivative of the *second* field, named for the slot it is used in).
    """
    return [v[0] * dv[0][k] + v[1] * dv[1][k]
            + sum(gam[k, i, j] * v[i] * w[j] for i in range(2) for j in range(2))
            for k in range(2)]


def inner(g11, g12, g22, a, b):
    return g11 * a[0] * b[0] + g12 * (a[0] * b[1] + a[1] * b[0]) + g22 * a[1] * b[1]
