"""Pure-numpy grid kernels.

Second-order central differences in the interior and second-order
one-sided differences on the edges (``np.gradient(..., edge_order=2)``).
Nested derivatives reuse the same stencil.
"""

import numpy as np

from .. import formulas


def _du(f, hu):
    return np.gradient(f, hu, axis=0, edge_order=2)


def _ds(f, hs):
    return np.gradient(f, hs, axis=1, edge_order=2)


def metric_first_derivatives(g11, g12, g22, hu, hs):
    return [(_du(g11, hu), _du(g12, hu), _du(g22, hu)),
            (_ds(g11, hs), _ds(g12, hs), _ds(g22, hs))]


def christoffels(g11, g12, g22, hu, hs):
    dg = metric_first_derivatives(g11, g12, g22, hu, hs)
    return formulas.christoffel_symbols(g11, g12, g22, dg)


def gauss_curvature(g11, g12, g22, hu, hs):
    gam = christoffels(g11, g12, g22, hu, hs)
    return formulas.gauss_equation_curvature(g11, gam, _du(gam[1, 0, 1], hu), _ds(gam[1, 0, 0], hs))


def brioschi(g11, g12, g22, hu, hs):
    (Eu, Fu, Gu), (Ev, Fv, Gv) = metric_first_derivatives(g11, g12, g22, hu, hs)
    return formulas.brioschi_curvature(g11, g12, g22, Eu, Ev, Fu, Fv, Gu, Gv,
                                       _ds(Ev, hs), _ds(Fu, hs), _du(Gu, hu))


def laplace_beltrami(g11, g12, g22, f, hu, hs):
    det = g11 * g22 - g12 * g12
    root = np.sqrt(det)
    fu, fs = _du(f, hu), _ds(f, hs)
    flux_u = (g22 * fu - g12 * fs) / root
    flux_s = (g11 * fs - g12 * fu) / root
    return -(_du(flux_u, hu) + _ds(flux_s, hs)) / root


def grad_norm_sq(g11, g12, g22, f, hu, hs):
    det = g11 * g22 - g12 * g12
    fu, fs = _du(f, hu), _ds(f, hs)
    return (g22 * fu * fu - 2.0 * g12 * fu * fs + g11 * fs * fs) / det
