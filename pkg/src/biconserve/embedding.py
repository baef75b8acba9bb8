"""Extrinsic data of the biconservative surface attached to a profile.

With f = (2/sqrt 3) sqrt(c - K) the shape operator is diagonal in the
frame X~1 = -X1, X~2 = -X2 with eigenvalues -f/2 and 3f/2, so that
trace A = f and K = c + det A.  This module builds A on the (u, s) grid and
checks the Gauss and Codazzi equations and the biconservativity condition
A(grad f) = -(f/2) grad f.

X1 = d_u - g12 d_s is the unit vector along grad K and X2 = d_s; for a
u-only function h, X1 h = h'.
"""

from dataclasses import dataclass

import numpy as np

from .grid import ScalarField, as_values
from .metric import _check_profile_grid, christoffels_closed_form
from .profile import check_domain, high_order_derivative
from .report import combine, refinement_tolerance, residual_report

FRAME_SIGN = -1.0  # X~i = FRAME_SIGN * Xi
CODAZZI_BASE_TOL = 1e-6
IDENTITY_TOL = 1e-12


def mean_curvature_from_k(profile):
    """f = (2/sqrt 3) sqrt(c - K) on the profile's u grid."""
    c, k = profile.c, profile.k_values
    check_domain(c, k)
    return ScalarField(2.0 / np.sqrt(3.0) * np.sqrt(c - k), None, "f")


def mean_curvature_gradient(profile):
    """X1 f = -K' / sqrt(3 (c - K)), the only nonzero frame component of grad f."""
    c, k = profile.c, profile.k_values
    check_domain(c, k)
    return -profile.kprime_values / np.sqrt(3.0 * (c - k))


@dataclass(frozen=True, eq=False)
class ShapeOperatorField:
    """Shape operator diagonal in the tilded frame.

    ``f``, ``lambda1``, ``lambda2`` are (nu, ns) arrays; ``x1t``/``x2t`` hold
    the (d_u, d_s) components of X~1 and X~2.
    """

    f: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    x1t: tuple
    x2t: tuple
    frame_sign: float = FRAME_SIGN

    def trace(self):
        return self.lambda1 + self.lambda2

    def det(self):
        return self.lambda1 * self.lambda2

    def coordinate_matrix(self):
        """A^i_j in (u, s) coordinates, shape (2, 2, nu, ns)."""
        e = np.array([[self.x1t[0], self.x2t[0]], [self.x1t[1], self.x2t[1]]])
        # inverse of the frame matrix columns (x1t, x2t)
        det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
        inv = np.array([[e[1, 1], -e[0, 1]], [-e[1, 0], e[0, 0]]]) / det
        lam = np.array([self.lambda1, self.lambda2])
        return _conjugate(e, lam, inv)

    def swapped(self):
        """The mismatched operator with the two eigenvalues exchanged."""
        return ShapeOperatorField(self.f, self.lambda2, self.lambda1, self.x1t, self.x2t,
                                  self.frame_sign)


def _conjugate(e, lam, inv):
    out = np.zeros_like(e)
    for i in range(2):
        for j in range(2):
            out[i, j] = sum(e[i, a] * lam[a] * inv[a, j] for a in range(2))
    return out


def build_shape_operator(profile, grid):
    """A with eigenvalues -f/2 on X~1 and 3f/2 on X~2."""
    _check_profile_grid(grid, profile)
    f = as_values(mean_curvature_from_k(profile).values, grid)
    one = np.ones(grid.shape)
    x1t = (FRAME_SIGN * one, FRAME_SIGN * -grid.g12)
    x2t = (0.0 * one, FRAME_SIGN * one)
    return ShapeOperatorField(np.array(f), -0.5 * f, 1.5 * f, x1t, x2t)


def gauss_equation_check(profile, grid, shape, tol=IDENTITY_TOL):
    """K - c - det A, relative to max |K|."""
    k = as_values(profile.k_values, grid)
    scale = max(1.0, float(np.max(np.abs(k))))
    residual = (k - profile.c - shape.det()) / scale
    return residual_report("gauss_equation", residual, tol, grid, (grid.u_grid, grid.s_grid),
                           boundary_width=0)


def codazzi_residual(profile, grid, shape, fprime="fd", stencil=5):
    """Frame components of (nabla_X~1 A) X~2 - (nabla_X~2 A) X~1.

    With nabla_X~1 X~i = 0, nabla_X~2 X~2 = mu X~1 and
    nabla_X~2 X~1 = -mu X~2, mu = 3 (X~1 f) / (4 f):

        X~1 component:  -X~2 lambda1
        X~2 component:  X~1 lambda2 - mu (lambda2 - lambda1)

    mu is taken from the K-form connection, mu = 3 K' / (8 (c - K)).
    X~1 lambda2 = -d_u lambda2 is differenced along u (``fprime="fd"``) with
    a ``stencil``-point formula (3 gives np.gradient's second order);
    ``"exact"`` differentiates the eigenvalue through f' analytically
    (valid only for the unperturbed operator).
    """
    _check_profile_grid(grid, profile)
    c, k, kp = profile.c, profile.k_values, profile.kprime_values
    mu = as_values(3.0 * kp / (8.0 * (c - k)), grid)
    if fprime == "fd" and stencil == 3:
        d_u = np.gradient(shape.lambda2, grid.hu, axis=0, edge_order=2)
    elif fprime == "fd":
        d_u = high_order_derivative(shape.lambda2, grid.hu, width=stencil)
    elif fprime == "exact":
        d_u = 1.5 * as_values(mean_curvature_gradient(profile), grid)
    else:
        raise ValueError(f"unknown fprime mode {fprime!r}")
    x1_lam2 = FRAME_SIGN * d_u
    # lambda1 depends on u only, so X~2 lambda1 = -d_s lambda1
    x2_lam1 = FRAME_SIGN * np.gradient(shape.lambda1, grid.hs, axis=1, edge_order=2)
    comp1 = -x2_lam1
    comp2 = x1_lam2 - mu * (shape.lambda2 - shape.lambda1)
    return comp1, comp2


def codazzi_check(profile, grid, shape, tol=None, fprime="fd", stencil=5):
    """Codazzi equation in the tilded frame, plus a coordinate cross-check.

    Default tolerance 1e-6 at h = 1e-2, scaled as h^2.
    """
    comp1, comp2 = codazzi_residual(profile, grid, shape, fprime, stencil)
    if tol is None:
        tol = refinement_tolerance(CODAZZI_BASE_TOL, grid.h)
    coords = (grid.u_grid, grid.s_grid)
    frame = residual_report("codazzi/frame", np.hypot(comp1, comp2), tol, grid, coords,
                            x1_component=float(np.max(np.abs(comp1))),
                            x2_component=float(np.max(np.abs(comp2))), stencil=stencil)
    coord = residual_report("codazzi/coordinates", codazzi_coordinate_residual(profile, grid, shape),
                            refinement_tolerance(1e-3, grid.h) * float(np.max(np.abs(shape.f))),
                            grid, coords)
    return combine("codazzi", [frame, coord], grid)


def codazzi_coordinate_residual(profile, grid, shape):
    """g-norm of (nabla_u A) d_s - (nabla_s A) d_u with closed-form Christoffels
    and differenced components of A."""
    gam = christoffels_closed_form(grid, profile).christoffels
    a = shape.coordinate_matrix()
    da = np.array([np.gradient(a, grid.hu, axis=2, edge_order=2),
                   np.gradient(a, grid.hs, axis=3, edge_order=2)])  # [k, i, j]
    # (nabla_k A)^i_j = d_k A^i_j + Gamma^i_kl A^l_j - Gamma^l_kj A^i_l
    nab = da.copy()
    for kk in range(2):
        for i in range(2):
            for j in range(2):
                for m in range(2):
                    nab[kk, i, j] += gam[i, kk, m] * a[m, j] - gam[m, kk, j] * a[i, m]
    v = nab[0, :, 1] - nab[1, :, 0]
    return np.sqrt(np.abs(grid.g11 * v[0] ** 2 + 2 * grid.g12 * v[0] * v[1] + grid.g22 * v[1] ** 2))


def biconservativity_check(profile, grid, shape, direction="f", tol=IDENTITY_TOL):
    """|A(grad h) + (f/2) grad h| for h = f (default) or h = K.

    grad h is formed in coordinates (g^{-1} dh) and A applied as a
    coordinate matrix, so the check does not presuppose the eigenframe.
    """
    _check_profile_grid(grid, profile)
    if direction == "f":
        dh = as_values(mean_curvature_gradient(profile), grid)
    elif direction == "K":
        dh = as_values(profile.kprime_values, grid)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    # h depends on u only: dh = (h', 0); grad^i = g^{i1} h'
    det = grid.det
    grad = np.array([grid.g22 / det * dh, -grid.g12 / det * dh])
    a = shape.coordinate_matrix()
    ag = np.einsum("ij...,j...->i...", a, grad)
    v = ag + 0.5 * shape.f * grad
    norm = np.sqrt(np.abs(grid.g11 * v[0] ** 2 + 2 * grid.g12 * v[0] * v[1] + grid.g22 * v[1] ** 2))
    scale = max(1.0, float(np.max(np.abs(shape.f * dh))))
    return residual_report(f"biconservativity/{direction}", norm / scale, tol, grid,
                           (grid.u_grid, grid.s_grid), boundary_width=0)


def eigenvalue_ratio_check(shape, tol=IDENTITY_TOL):
    """lambda2 / lambda1 + 3 everywhere."""
    return residual_report("eigenvalue_ratio", shape.lambda2 / shape.lambda1 + 3.0, tol,
                           boundary_width=0)


def frame_connection_tilded_check(profile, grid, tol=IDENTITY_TOL):
    """Chain-rule identities linking the f-form and K-form connections.

    (X~1 f)/f + (X~1 K)/(2 (c - K)) = 0 and
    3 X1 f/(4 f) + 3 X1 K/(8 (c - K)) = 0 with the analytic gradient of f;
    a third check compares differenced X1 f with the analytic value.
    """
    _check_profile_grid(grid, profile)
    c, k, kp = profile.c, profile.k_values, profile.kprime_values
    f = mean_curvature_from_k(profile).values
    x1f = mean_curvature_gradient(profile)
    t_x1f, t_x1k = FRAME_SIGN * x1f, FRAME_SIGN * kp
    ident = t_x1f / f + t_x1k / (2.0 * (c - k))
    coeff = 3.0 * x1f / (4.0 * f) + 3.0 * kp / (8.0 * (c - k))
    coords = (profile.u_grid,)
    checks = [
        residual_report("tilded/identity", as_values(ident, grid), tol, grid,
                        (grid.u_grid, grid.s_grid), boundary_width=0),
        residual_report("tilded/coefficients", as_values(coeff, grid), tol, grid,
                        (grid.u_grid, grid.s_grid), boundary_width=0),
    ]
    fd = np.gradient(f, profile.h, edge_order=2)
    scale = max(1.0, float(np.max(np.abs(x1f))))
    checks.append(residual_report("tilded/differenced_x1f", (fd - x1f) / scale,
                                  refinement_tolerance(1e-3, grid.h), None, coords))
    return combine("frame_connection_tilded", checks, grid)


def embedding_report(profile, grid, shape=None):
    """All extrinsic checks rolled into one stage report."""
    if shape is None:
        shape = build_shape_operator(profile, grid)
    checks = [
        gauss_equation_check(profile, grid, shape),
        codazzi_check(profile, grid, shape),
        biconservativity_check(profile, grid, shape),
        eigenvalue_ratio_check(shape),
        frame_connection_tilded_check(profile, grid),
    ]
    return combine("embedding", checks, grid)
