"""The (u, s) metric built from a curvature profile, and checks on it.

For a profile K(u) with a = -3 K' / (8 (c - K)) the metric is

    g11 = 1 + a^2 s^2,   g12 = a s,   g22 = 1,

so det g = 1, the curves u = const are unit-speed circles of geodesic
curvature -a, and X1 = d_u - g12 d_s, X2 = d_s is an orthonormal frame.
The functions here build that metric, compute its connection exactly and
by finite differences, recover its Gaussian curvature two independent ways,
and move it to orthogonal and isothermal charts.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
import warnings

from . import formulas, kernels
from .errors import GridTooSmallError, MismatchError
from .grid import ConnectionData, MetricGrid, ScalarField, as_values
from .jets import Jet
from .profile import check_domain
from .report import combine, refinement_tolerance, residual_report


def _check_profile_grid(grid, profile):
    if grid.shape[0] != len(profile) or not np.allclose(grid.u_grid, profile.u_grid, rtol=0, atol=1e-12):
        raise MismatchError(f"grid u samples ({grid.shape[0]}) do not match the profile ({len(profile)})")


def build_metric(profile, s_grid):
    c, k, kp = profile.c, profile.k_values, profile.kprime_values
    check_domain(c, k)
    s = np.asarray(s_grid, dtype=float)[None, :]
    ratio = (kp / (c - k))[:, None]
    g11 = 9.0 / 64.0 * ratio**2 * s**2 + 1.0
    g12 = -3.0 * ratio / 8.0 * s
    g22 = np.ones_like(g11)
    return MetricGrid(profile.u_grid, s_grid, g11, g12, g22, c=c, meta={"chart": "us"})


def make_grid(profile, s_extent=1.0, ns=201):
    """build_metric on the symmetric s range [-s_extent, s_extent]."""
    return build_metric(profile, np.linspace(-s_extent, s_extent, ns))


@dataclass(frozen=True, eq=False)
class MetricDerivatives:
    """Metric components with exact first and second partial derivatives.

    ``dg[m]`` = d_m (g11, g12, g22); ``ddg[m][n]`` = d_m d_n (g11, g12, g22).
    """

    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    dg: list
    ddg: list

    def grid(self, u, s, c=0.0, **meta):
        return MetricGrid(u, s, self.g11, self.g12, self.g22, c=c, meta=meta)


def metric_derivatives(profile, s_grid):
    """Exact derivatives of the (u, s) metric, using ODE-generated K''' for a''."""
    c = profile.c
    check_domain(c, profile.k_values)
    kj = profile.jet(3)
    a_jet = -3.0 / 8.0 * kj.diff() / (c - kj)
    a, ap, app = (x[:, None] for x in a_jet.derivatives())
    s = np.asarray(s_grid, dtype=float)[None, :]
    zero = np.zeros(np.broadcast(a, s).shape)
    one = zero + 1.0
    g11, g12, g22 = one + a**2 * s**2, zero + a * s, one
    dg = [(2 * a * ap * s**2, zero + ap * s, zero),
          (zero + 2 * a**2 * s, zero + a, zero)]
    d_uu = (2 * (ap**2 + a * app) * s**2, zero + app * s, zero)
    d_us = (zero + 4 * a * ap * s, zero + ap, zero)
    d_ss = (zero + 2 * a**2, zero, zero)
    return MetricDerivatives(g11, g12, g22, dg, [[d_uu, d_us], [d_us, d_ss]])


def christoffels_exact(md):
    return formulas.christoffel_symbols(md.g11, md.g12, md.g22, md.dg)


def gauss_curvature_exact(md):
    """Gauss-equation curvature from exact metric derivatives."""
    gam = formulas.christoffel_symbols(md.g11, md.g12, md.g22, md.dg)
    dgam = formulas.christoffel_derivatives(md.g11, md.g12, md.g22, md.dg, md.ddg)
    return formulas.gauss_equation_curvature(md.g11, gam, dgam[0, 1, 0, 1], dgam[1, 1, 0, 0])


def brioschi_exact(md):
    (Eu, Fu, Gu), (Ev, Fv, Gv) = md.dg
    Guu = md.ddg[0][0][2]
    Fuv = md.ddg[0][1][1]
    Evv = md.ddg[1][1][0]
    return formulas.brioschi_curvature(md.g11, md.g12, md.g22, Eu, Ev, Fu, Fv, Gu, Gv, Evv, Fuv, Guu)


def christoffels_closed_form(grid, profile):
    """Connection of the (u, s) metric from analytic derivatives.

    Gamma^1_22 comes out as d g12 / d s = -3 K' / (8 (c - K)).
    """
    _check_profile_grid(grid, profile)
    md = metric_derivatives(profile, grid.s_grid)
    gam = christoffels_exact(md)
    zero = np.zeros(grid.shape)
    x1 = (zero + 1.0, -grid.g12)
    x2 = (zero, zero + 1.0)
    dx1 = ((zero, -md.dg[0][1]), (zero, -md.dg[1][1]))
    dx2 = ((zero, zero), (zero, zero))
    return ConnectionData(gam, x1, x2, dx1, dx2, source="closed-form")


def _orthonormal_frame(grid):
    # X2 along d_s, X1 its positively oriented orthogonal complement
    sigma = np.sqrt(grid.g11 - grid.g12**2 / grid.g22)
    x1 = (1.0 / sigma, -grid.g12 / (grid.g22 * sigma))
    x2 = (np.zeros(grid.shape), 1.0 / np.sqrt(grid.g22))
    return x1, x2


def _grad(f, grid):
    return (np.gradient(f, grid.hu, axis=0, edge_order=2),
            np.gradient(f, grid.hs, axis=1, edge_order=2))


def christoffels_fd(grid):
    grid.require(3)
    gam = kernels.christoffels(grid.g11, grid.g12, grid.g22, grid.hu, grid.hs)
    x1, x2 = _orthonormal_frame(grid)
    d1 = [_grad(x1[k], grid) for k in range(2)]
    d2 = [_grad(x2[k], grid) for k in range(2)]
    dx1 = tuple((d1[0][m], d1[1][m]) for m in range(2))
    dx2 = tuple((d2[0][m], d2[1][m]) for m in range(2))
    return ConnectionData(gam, x1, x2, dx1, dx2, source="fd")


def gauss_curvature_fd(grid):
    """Discrete Gaussian curvature via the Christoffel form of the Gauss equation."""
    grid.require(5)
    k = kernels.gauss_curvature(grid.g11, grid.g12, grid.g22, grid.hu, grid.hs)
    return ScalarField(k, grid, "K")


def brioschi_fd(grid):
    """Discrete Gaussian curvature via Brioschi's determinant formula."""
    grid.require(5)
    k = kernels.brioschi(grid.g11, grid.g12, grid.g22, grid.hu, grid.hs)
    return ScalarField(k, grid, "K")


def kappa_closed_form(grid, profile):
    _check_profile_grid(grid, profile)
    check_domain(profile.c, profile.k_values)
    return ScalarField(as_values(profile.kappa(), grid), grid, "kappa")


def level_curve_curvature(grid, profile):
    """Geodesic curvature of s -> X(u, s) as -d g12 / d s, by differencing."""
    _check_profile_grid(grid, profile)
    check_domain(profile.c, profile.k_values)
    if grid.shape[1] < 3:
        raise GridTooSmallError("need >= 3 samples along s")
    kappa = -np.gradient(grid.g12, grid.hs, axis=1, edge_order=2)
    return ScalarField(kappa, grid, "kappa")


def frame_connection_check(grid, profile, conn, tol=None):
    """Residuals of the frame connection identities of the (u, s) metric.

    nabla_X1 X1 = 0, nabla_X1 X2 = 0, nabla_X2 X2 = -kappa X1,
    nabla_X2 X1 = kappa X2 with kappa = 3 K' / (8 (c - K)); norms are
    taken in g.
    """
    _check_profile_grid(grid, profile)
    if conn.christoffels.shape[3:] != grid.shape:
        raise MismatchError("connection data does not match the grid")
    if tol is None:
        tol = 1e-10 if conn.source == "closed-form" else refinement_tolerance(1e-3, grid.h)
    kappa = as_values(profile.kappa(), grid)
    gam, x1, x2 = conn.christoffels, conn.x1, conn.x2
    cov = formulas.covariant_derivative
    identities = {
        "nabla_X1_X1": cov(x1, conn.dx1, x1, gam),
        "nabla_X1_X2": cov(x1, conn.dx2, x2, gam),
        "nabla_X2_X2+kappa_X1": [a + kappa * b for a, b in zip(cov(x2, conn.dx2, x2, gam), x1)],
        "nabla_X2_X1-kappa_X2": [a - kappa * b for a, b in zip(cov(x2, conn.dx1, x1, gam), x2)],
    }
    coords = (grid.u_grid, grid.s_grid)
    checks = []
    for name, vec in identities.items():
        norm = np.sqrt(np.abs(formulas.inner(grid.g11, grid.g12, grid.g22, vec, vec)))
        checks.append(residual_report(name, norm, tol, grid, coords))
    return combine(f"frame_connection[{conn.source}]", checks, grid)


def frame_orthonormality(grid, profile):
    """Max deviation of the item-(e) frame (X1 = d_u - g12 d_s, X2 = d_s) from orthonormal."""
    _check_profile_grid(grid, profile)
    zero = np.zeros(grid.shape)
    x1, x2 = (zero + 1.0, -grid.g12), (zero, zero + 1.0)
    ip = lambda a, b: formulas.inner(grid.g11, grid.g12, grid.g22, a, b)  # noqa: E731
    return float(max(np.abs(ip(x1, x1) - 1).max(), np.abs(ip(x2, x2) - 1).max(), np.abs(ip(x1, x2)).max()))


def to_orthogonal(grid, profile):
    """The same surface in coordinates (u, v), v = (c - K)^{3/8} s.

    The metric becomes du^2 + (c - K)^{-3/4} dv^2.  The v samples reuse the
    s samples (the chart is rectangular in (u, v)).
    """
    _check_profile_grid(grid, profile)
    c, k = profile.c, profile.k_values
    check_domain(c, k)
    ones = np.ones(grid.shape)
    g22 = as_values((c - k) ** -0.75, grid) * ones
    return MetricGrid(grid.u_grid, grid.s_grid, ones, np.zeros(grid.shape), g22, c=c,
                      meta={"chart": "orthogonal"})


def orthogonal_pullback(grid, profile):
    """Pull du^2 + (c - K)^{-3/4} dv^2 back along (u, s) -> (u, (c - K)^{3/8} s).

    The Jacobian of the coordinate map is taken by finite differences, so
    agreement with the (u, s) metric is O(h^2).  Returns (g11, g12, g22).
    """
    _check_profile_grid(grid, profile)
    c, k = profile.c, profile.k_values
    U, S = grid.mesh()
    v = as_values((c - k) ** 0.375, grid) * S
    v_u, v_s = _grad(v, grid)
    lam = as_values((c - k) ** -0.75, grid)
    return 1.0 + lam * v_u**2, lam * v_u * v_s, lam * v_s**2


def isothermal_coordinate(u, integrand, u0):
    """u~(u) = int_{u0}^{u} integrand, by cumulative Simpson on a uniform grid.

    Warns when Simpson and trapezoid disagree by more than 1e-6 (grid too
    coarse for a trustworthy quadrature).
    """
    u = np.asarray(u, dtype=float)
    integrand = np.asarray(integrand, dtype=float)
    if not u[0] <= u0 <= u[-1]:
        raise ValueError(f"u0 = {u0} outside [{u[0]}, {u[-1]}]")
    simpson = cumulative_simpson(integrand, x=u, initial=0.0)
    trap = cumulative_trapezoid(integrand, x=u, initial=0.0)
    if np.max(np.abs(simpson - trap)) > 1e-6 * max(1.0, np.max(np.abs(simpson))):
        warnings.warn("isothermal quadrature: grid may be too coarse for the requested accuracy",
                      RuntimeWarning, stacklevel=2)
    offset = CubicHermiteSpline(u, simpson, integrand)(u0)
    return simpson - offset


def to_isothermal(grid, profile, u0=None):
    """Conformally flat chart: g = (c - K)^{-3/4} (du~^2 + dv~^2).

    u~ = int_{u0}^u (c - K)^{3/8} du; the returned grid is uniform in u~ with
    the same number of samples, u(u~) comes from monotone cubic inverse
    interpolation, K on the new samples from Hermite interpolation with K'.
    ``meta`` carries the arrays ``u_of_chart`` and ``K``.
    """
    _check_profile_grid(grid, profile)
    c, u, k, kp = profile.c, profile.u_grid, profile.k_values, profile.kprime_values
    check_domain(c, k)
    if u0 is None:
        u0 = float(u[0])
    ut = isothermal_coordinate(u, (c - k) ** 0.375, u0)
    ut_grid = np.linspace(ut[0], ut[-1], u.size)
    u_of = PchipInterpolator(ut, u)(ut_grid)
    u_of[0], u_of[-1] = u[0], u[-1]
    k_new = CubicHermiteSpline(u, k, kp)(u_of)
    lam = np.broadcast_to(((c - k_new) ** -0.75)[:, None], grid.shape)
    return MetricGrid(ut_grid, grid.s_grid, lam, np.zeros(grid.shape), lam, c=c,
                      meta={"chart": "isothermal", "u0": u0, "u_of_chart": u_of, "K": k_new})


# -- analytic fixtures ------------------------------------------------------

def _mesh(u, s):
    return np.meshgrid(np.asarray(u, float), np.asarray(s, float), indexing="ij")


def flat_fixture(u, s):
    """du^2 + ds^2; returns (MetricDerivatives, K)."""
    U, _ = _mesh(u, s)
    zero, one = np.zeros_like(U), np.ones_like(U)
    z3 = (zero, zero, zero)
    return MetricDerivatives(one, zero, one, [z3, z3], [[z3, z3], [z3, z3]]), zero


def sphere_fixture(theta, phi):
    """Round unit sphere d theta^2 + sin^2 theta d phi^2 (K = 1)."""
    T, _ = _mesh(theta, phi)
    zero, one = np.zeros_like(T), np.ones_like(T)
    z3 = (zero, zero, zero)
    dg = [(zero, zero, np.sin(2 * T)), z3]
    ddg = [[(zero, zero, 2 * np.cos(2 * T)), z3], [z3, z3]]
    return MetricDerivatives(one, zero, np.sin(T) ** 2, dg, ddg), one


def conformal_u_fixture(u, s, lam_jet):
    """lambda(u) (du^2 + ds^2) from a u-jet of lambda of order >= 2.

    K = -(log lambda)'' / (2 lambda).
    """
    U, _ = _mesh(u, s)
    lam, lp, lpp = (np.broadcast_to(np.asarray(x)[:, None], U.shape) for x in lam_jet.derivatives()[:3])
    zero = np.zeros_like(U)
    z3 = (zero, zero, zero)
    dg = [(lp, zero, lp), z3]
    ddg = [[(lpp, zero, lpp), z3], [z3, z3]]
    k = -(lpp / lam - (lp / lam) ** 2) / (2 * lam)
    return MetricDerivatives(lam, zero, lam, dg, ddg), k


def catenoid_fixture(u, v):
    """Catenoid cosh^2 u (du^2 + dv^2), K = -1 / cosh^4 u.  Satisfies the
    Ricci condition with c = 0."""
    u = np.asarray(u, float)
    lam = Jet.from_derivatives([np.cosh(u) ** 2, np.sinh(2 * u), 2 * np.cosh(2 * u)])
    md, _ = conformal_u_fixture(u, v, lam)
    U, _ = _mesh(u, v)
    return md, -1.0 / np.cosh(U) ** 4
