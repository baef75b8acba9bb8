"""Conformal changes g -> e^{2 phi} g and the Ricci-type conditions.

Laplacians use the positive convention Lap = -div grad, under which

    K_bar = e^{-2 phi} (K + Lap phi),      Lap_bar = e^{-2 phi} Lap.

A metric with c - K > 0 is a Ricci surface (minimal variant) when
(c - K)^{1/2} g is flat; the biconservative variant replaces 1/2 by 3/4 and
the constant 4 by 8/3 in the equivalent curvature equations.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from . import kernels
from .errors import DomainError
from .grid import ScalarField, as_values
from .metric import gauss_curvature_fd
from .profile import eps_dom
from .report import Report, coarse_tolerance, refinement_tolerance, residual_report

# variant -> (constant in the curvature equations, flattening exponent, target of form iv)
VARIANTS = {
    "minimal": (4.0, 0.5, 1.0),
    "biconservative": (8.0 / 3.0, 0.75, 1.0 / 3.0),
}
FORMS = ("i", "ii", "iii", "iv")
# base tolerances at h = 1e-2, relative to max |K|
FORM_TOLERANCE = {"i": 1e-4, "ii": 1e-4, "iii": 1e-3, "iv": 1e-3}
# Checks that difference the metric four times hit a roundoff floor of about
# eps / h^4, so their relative tolerance is not tightened under refinement.
NESTED_TOLERANCE = 1e-3


def laplace_beltrami(grid, h):
    grid.require(5)
    vals = as_values(h, grid)
    return ScalarField(kernels.laplace_beltrami(grid.g11, grid.g12, grid.g22, vals, grid.hu, grid.hs),
                       grid, "lap")


def grad_norm_sq(grid, h):
    """|grad h|^2 = g^{ij} d_i h d_j h with the Laplacian's stencils."""
    vals = as_values(h, grid)
    return ScalarField(kernels.grad_norm_sq(grid.g11, grid.g12, grid.g22, vals, grid.hu, grid.hs),
                       grid, "grad_sq")


@dataclass(frozen=True, eq=False)
class ConformalFactor:
    """The exponent phi of g_bar = e^{2 phi} g."""

    phi: np.ndarray

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if not np.all(np.isfinite(phi)):
            raise ValueError("conformal factor must be finite everywhere")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def power(cls, c, k, r):
        """phi for (c - K)^r g."""
        _check_positive(c, k)
        return cls(0.5 * np.asarray(r) * np.log(c - np.asarray(k, dtype=float)))

    def weight(self, grid=None):
        phi = as_values(self.phi, grid) if grid is not None else self.phi
        return np.exp(2.0 * phi)

    def apply(self, grid, **meta):
        return grid.scaled(self.weight(grid), **meta)


def _check_positive(c, k):
    k = np.asarray(k, dtype=float)
    if np.any((c - k) <= eps_dom(c, k)):
        raise DomainError("c - K <= eps_dom on the grid")


def conformal_gauss(grid, k, factor):
    """Curvature of e^{2 phi} g from the curvature K of g."""
    phi = as_values(factor.phi, grid)
    lap_phi = laplace_beltrami(grid, phi).values
    return ScalarField(np.exp(-2.0 * phi) * (as_values(k, grid) + lap_phi), grid, "K_bar")


def conformal_laplacian_check(grid, factor, h, tol=None):
    """Compare Lap of e^{2 phi} g applied to h against e^{-2 phi} Lap h."""
    phi = as_values(factor.phi, grid)
    direct = laplace_beltrami(factor.apply(grid), h).values
    scaled = np.exp(-2.0 * phi) * laplace_beltrami(grid, h).values
    if tol is None:
        scale = max(1.0, float(np.max(np.abs(scaled))))
        tol = refinement_tolerance(1e-3, grid.h) * scale
    return residual_report("conformal_laplacian", direct - scaled, tol, grid,
                           (grid.u_grid, grid.s_grid))


@dataclass
class RicciReport:
    condition: str
    residual: ScalarField
    max_residual: float
    l2_residual: float
    passed: bool
    tolerance: float
    grid: dict = field(default_factory=dict)
    precondition: "RicciReport" = None
    report: Report = None

    def to_dict(self):
        out = {
            "condition": self.condition,
            "max_residual": float(self.max_residual),
            "l2_residual": float(self.l2_residual),
            "grid": dict(self.grid),
            "passed": bool(self.passed),
            "tolerance": float(self.tolerance),
        }
        if self.precondition is not None:
            out["precondition"] = self.precondition.to_dict()
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _ricci_report(condition, residual, tol, grid, boundary_width=2):
    rep = residual_report(condition, residual, tol, grid, (grid.u_grid, grid.s_grid),
                          boundary_width=boundary_width)
    return RicciReport(condition, ScalarField(residual, grid, condition), rep.max_residual,
                       rep.l2_residual, rep.passed, tol, grid.describe(), report=rep)


def ricci_residual(grid, k, c, variant, form):
    """Residual field of one of the equivalent Ricci-type conditions.

    (i)   (c-K) Lap K - |grad K|^2 - m K (c-K)^2
    (ii)  Lap log(c-K) + m K
    (iii) curvature of (c-K)^p g
    (iv)  curvature of (-K) g minus its target constant (c = 0 only)
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    m, p, target = VARIANTS[variant]
    k = as_values(k, grid)
    _check_positive(c, k)
    if form == "i":
        lap_k = laplace_beltrami(grid, k).values
        return (c - k) * lap_k - grad_norm_sq(grid, k).values - m * k * (c - k) ** 2
    if form == "ii":
        return laplace_beltrami(grid, np.log(c - k)).values + m * k
    if form == "iii":
        return gauss_curvature_fd(grid.scaled((c - k) ** p)).values
    if c != 0:
        raise ValueError("form iv applies only when c = 0")
    return gauss_curvature_fd(grid.scaled(-k)).values - target


def ricci_condition(grid, k, c, variant="biconservative", form="ii", tol=None, boundary_width=2):
    """Evaluate one Ricci-type condition and judge it against ``tol``.

    Default tolerances are refinement-indexed: FORM_TOLERANCE[form] at
    h = 1e-2, scaled by (h / 1e-2)^2, relative to max |K| except for form iv.
    """
    residual = ricci_residual(grid, k, c, variant, form)
    if tol is None:
        scale = 1.0 if form == "iv" else float(np.max(np.abs(as_values(k, grid))))
        tol = refinement_tolerance(FORM_TOLERANCE[form], grid.h) * scale
    return _ricci_report(f"{variant}/{form}", residual, tol, grid, boundary_width)


def power_metric_curvature(grid, k, c, r):
    """Curvature of (c - K)^r g for constant r:
    K_r = (c - K)^{-r} (K + (r / 2) Lap log(c - K))."""
    k = as_values(k, grid)
    _check_positive(c, k)
    lap_log = laplace_beltrami(grid, np.log(c - k)).values
    return ScalarField((c - k) ** (-r) * (k + 0.5 * r * lap_log), grid, "K_r")


def kr3_residual(grid, k):
    """K Lap K + |grad K|^2 + (8/3) K^3 (the c = 0 biconservative-type equation)."""
    k = as_values(k, grid)
    return (k * laplace_beltrami(grid, k).values + grad_norm_sq(grid, k).values
            + (8.0 / 3.0) * k**3)


def ricci_transform(grid, k, tol=None, boundary_width=4):
    """For c = 0: rescale to (-K)^{1/2} g and check the minimal Ricci condition.

    The precondition K Lap K + |grad K|^2 + (8/3) K^3 = 0 is evaluated and
    attached to the returned report; when it fails the transform is still
    returned but the report is marked failed.  The transformed curvature is
    recomputed from the new metric, then Lap_new log(-K_new) + 4 K_new is the
    residual (tolerance relative to max |K_new|).  A pointwise comparison
    of K_new with -(1/3) (-K)^{1/2} is attached under ``details``.
    """
    k = as_values(k, grid)
    if np.any(k >= 0):
        raise DomainError("the transform needs K < 0 everywhere")
    kmax = float(np.max(np.abs(k)))
    pre_tol = refinement_tolerance(1e-3, grid.h) * kmax**3
    pre = _ricci_report("precondition/kr3", kr3_residual(grid, k), pre_tol, grid)
    new_grid = grid.scaled(np.sqrt(-k), chart=grid.meta.get("chart", ""), transform="ricci")
    k_new = gauss_curvature_fd(new_grid).values
    residual = laplace_beltrami(new_grid, np.log(-k_new)).values + 4.0 * k_new
    if tol is None:
        tol = coarse_tolerance(NESTED_TOLERANCE, new_grid.h) * float(np.max(np.abs(k_new)))
    rep = _ricci_report("minimal/ii", residual, tol, new_grid, boundary_width=boundary_width)
    rep.precondition = pre
    match = transformed_curvature_check(new_grid, k, k_new)
    rep.report.checks.append(match)
    rep.passed = rep.passed and pre.passed and match.passed
    return new_grid, rep


def transformed_curvature_check(new_grid, k, k_new, tol=None):
    """Relative error of K_new against -(1/3) (-K)^{1/2}."""
    if tol is None:
        tol = coarse_tolerance(NESTED_TOLERANCE, new_grid.h)
    expected = -np.sqrt(-k) / 3.0
    return residual_report("transformed_curvature", (k_new - expected) / np.abs(expected), tol,
                           new_grid, (new_grid.u_grid, new_grid.s_grid), boundary_width=2)


def inverse_ricci_transform(grid, k, tol=None, boundary_width=4):
    """For a c = 0 Ricci surface: (-K)^{-1} g, whose curvature K_hat should
    satisfy K_hat Lap K_hat + |grad K_hat|^2 + (8/3) K_hat^3 = 0."""
    k = as_values(k, grid)
    if np.any(k >= 0):
        raise DomainError("the inverse transform needs K < 0 everywhere")
    new_grid = grid.scaled(-1.0 / k, transform="inverse_ricci")
    k_new = gauss_curvature_fd(new_grid).values
    residual = kr3_residual(new_grid, k_new)
    if tol is None:
        tol = coarse_tolerance(NESTED_TOLERANCE, new_grid.h) * float(np.max(np.abs(k_new))) ** 3
    return new_grid, _ricci_report("precondition/kr3", residual, tol, new_grid,
                                   boundary_width=boundary_width)
