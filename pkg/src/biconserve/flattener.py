"""Flattening exponents r(u): make (c - K_r)^{1/2} (c - K)^r g flat.

For r depending on u only, the curvature of (c - K)^r g is

    K_r = (c - K)^{-r} ((3 - 4r)/3 K + 1/2 L Lap r + r' K' / (c - K)),

with L = log(c - K) and Lap r = -r'' - kappa r'.  The rescaled metric
e^{2 phi} g, phi = 1/4 log(c - K_r) + r/2 L, is flat exactly when

    R = K + Lap phi = K - phi'' - kappa phi' = 0.

R involves r up to its fourth derivative and is affine in r'''' with slope
proportional to L, so the fourth-order ODE degenerates where c - K = 1.
Such samples are reported and left out of the solve.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.interpolate import BSpline

from . import jets
from .errors import ConvergenceError, DomainError, InfeasibleError
from .grid import ScalarField
from .jets import Jet
from .metric import build_metric, gauss_curvature_fd
from .ode import integrate_uniform
from .profile import _kpp, check_domain, curvature_jet, eps_dom, high_order_derivative
from .report import combine, refinement_tolerance, residual_report

log = logging.getLogger(__name__)

SHOOTING_TOL = 1e-8
COLLOCATION_TOL = 1e-6
# |dR/dr''''| below this (relative to the r''''-free part) marks a degenerate sample
DEGENERATE_REL = 1e-9


@dataclass(frozen=True, eq=False)
class ExponentProfile:
    """r(u) and its first three derivatives on a profile's u grid."""

    u_grid: np.ndarray
    r: np.ndarray
    rprime: np.ndarray
    rsecond: np.ndarray
    rthird: np.ndarray
    feasible: np.ndarray = None
    method: str = ""
    degenerate: tuple = ()
    trace: list = field(default_factory=list)

    def __post_init__(self):
        n = np.asarray(self.u_grid).size
        for name in ("u_grid", "r", "rprime", "rsecond", "rthird"):
            arr = np.array(np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (n,)))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.feasible is None:
            object.__setattr__(self, "feasible", np.ones(n, dtype=bool))

    @classmethod
    def constant(cls, u_grid, value, **kw):
        z = np.zeros(len(u_grid))
        return cls(u_grid, z + value, z, z, z, **kw)

    def derivatives(self):
        return (self.r, self.rprime, self.rsecond, self.rthird)


def _aligned(profile, rprof):
    if rprof.u_grid.size != profile.u_grid.size or not np.allclose(rprof.u_grid, profile.u_grid):
        raise ValueError("exponent profile is not aligned with the curvature profile")


def _kr_jet(c, kj, rj):
    """K_r as a jet, from jets of K and r (same order)."""
    diff_k = c - kj
    big_l = jets.log(diff_k)
    kp = kj.diff()
    rp = rj.diff()
    kappa = 3.0 * kp / (8.0 * diff_k.truncate(kp.order))
    lap_r = -rp.diff() - kappa.truncate(rp.order - 1) * rp.truncate(rp.order - 1)
    n = lap_r.order
    inner = ((3.0 - 4.0 * rj.truncate(n)) / 3.0 * kj.truncate(n)
             + 0.5 * big_l.truncate(n) * lap_r
             + rp.truncate(n) * kp.truncate(n) / diff_k.truncate(n))
    return jets.exp(-rj.truncate(n) * big_l.truncate(n)) * inner


def kr_of_function_r(profile, rprof):
    """Curvature K_r of (c - K)^r g for a u-only exponent, on the u grid."""
    _aligned(profile, rprof)
    check_domain(profile.c, profile.k_values)
    kj = profile.jet(2)
    rj = Jet.from_derivatives([rprof.r, rprof.rprime, rprof.rsecond])
    return ScalarField(_kr_jet(profile.c, kj, rj).value, None, "K_r")


def _residual_jet(c, kj, rj):
    """R = K - phi'' - kappa phi' from order-4 jets of K and r (values only)."""
    kr = _kr_jet(c, kj, rj)  # order 2
    if np.any(np.asarray(c - kr.value) <= eps_dom(c, kr.value)):
        raise InfeasibleError("c - K_r <= eps_dom", indices=_bad(c, kr.value))
    big_l = jets.log(c - kj.truncate(2))
    phi = 0.25 * jets.log(c - kr) + 0.5 * rj.truncate(2) * big_l
    kappa = 3.0 * kj.derivative(1) / (8.0 * (c - kj.value))
    return kj.value - phi.derivative(2) - kappa * phi.derivative(1)


def _bad(c, kr):
    kr = np.atleast_1d(kr)
    return tuple(int(i) for i in np.flatnonzero((c - kr) <= eps_dom(c, kr)))


def exact_residual(c, k, kprime, rderivs):
    """R at points where K, K' and r, ..., r'''' are known exactly."""
    kj = curvature_jet(c, k, kprime, 4)
    rj = Jet.from_derivatives(rderivs)
    return _residual_jet(c, kj, rj)


def residual_affine(c, k, kprime, r, rp, rpp, rppp):
    """(R at r'''' = 0, dR/dr'''') at the given states; R is affine in r''''."""
    kj = curvature_jet(c, k, kprime, 4)
    zero = np.zeros_like(np.asarray(r, dtype=float))
    r0 = _residual_jet(c, kj, Jet.from_derivatives([r, rp, rpp, rppp, zero]))
    r1 = _residual_jet(c, kj, Jet.from_derivatives([r, rp, rpp, rppp, zero + 1.0]))
    return r0, r1 - r0


def degenerate_mask(c, k, base, slope):
    """Samples where the r'''' coefficient is negligible (log(c - K) near 0)."""
    scale = np.maximum(1.0, np.abs(base))
    return (np.abs(slope) <= DEGENERATE_REL * scale) | (np.abs(np.log(c - np.asarray(k))) <= 1e-12)


def flatten_residual(profile, rprof):
    """K + Lap phi on the u grid from stored (r, r', r'', r''').

    phi' is exact given the stored states; phi'' comes from one 7-point
    differencing of phi'.
    """
    _aligned(profile, rprof)
    c = profile.c
    check_domain(c, profile.k_values)
    kj = profile.jet(1)
    # order-1 jets of r need r''' for K_r'
    rj = Jet.from_derivatives([rprof.r, rprof.rprime, rprof.rsecond, rprof.rthird])
    kj2 = profile.jet(3)
    kr = _kr_jet(c, kj2, rj)  # order 1
    bad = _bad(c, kr.value)
    if bad:
        raise InfeasibleError(f"c - K_r <= eps_dom at {len(bad)} sample(s)", indices=bad)
    big_l = jets.log(c - kj)
    phi = 0.25 * jets.log(c - kr) + 0.5 * rj.truncate(1) * big_l
    phip = phi.derivative(1)
    if len(profile) < 2:
        raise ValueError("need at least two samples")
    phipp = high_order_derivative(phip, profile.h)
    return ScalarField(profile.k_values - phipp - profile.kappa() * phip, None, "flatten_residual")


def feasibility_check(profile, r0, r0p, r0pp):
    """Evaluate (c - K_r)(p0) > 0 at u = u0 in its printed form.

    Returns ``(feasible, margin)`` with margin = c - (left side), where
    the left side uses 3 f'/(4 f) for the Laplacian coefficient and
    f = (2/sqrt 3) sqrt(c - K).
    """
    c = profile.c
    k, kp = float(profile.k_values[0]), float(profile.kprime_values[0])
    check_domain(c, k)
    f = 2.0 / np.sqrt(3.0) * np.sqrt(c - k)
    fp = -kp / (np.sqrt(3.0) * np.sqrt(c - k))
    lhs = (c - k) ** (-r0) * ((3.0 - 4.0 * r0) / 3.0 * k
                              + 0.5 * np.log(c - k) * (-r0pp + 3.0 * fp / (4.0 * f) * r0p)
                              + r0p * kp / (c - k))
    margin = float(c - lhs)
    return margin > 0.0, margin


def _check_feasible(profile, r0, r0p, r0pp):
    ok, margin = feasibility_check(profile, r0, r0p, r0pp)
    if not ok:
        raise InfeasibleError(f"initial data infeasible: margin c - K_r(u0) = {margin:.6g}", indices=(0,))
    return margin


def solve_exponent(profile, r0, r0p=0.0, r0pp=0.0, r0ppp=0.0, method="shooting", tol=None,
                   max_iter=50):
    """Solve R = 0 for r(u) with the four initial values given at u0."""
    _check_feasible(profile, r0, r0p, r0pp)
    if method == "shooting":
        return _shoot(profile, (r0, r0p, r0pp, r0ppp), SHOOTING_TOL if tol is None else tol)
    if method == "collocation":
        return _collocate(profile, (r0, r0p, r0pp, r0ppp), COLLOCATION_TOL if tol is None else tol,
                          max_iter)
    raise ValueError(f"unknown method {method!r}")


def _solve_r4(c, k, kp, r, rp, rpp, rppp):
    """r'''' solving R = 0 at one state; (value, degenerate flag).

    R is affine in r'''', so the secant through r'''' = 0 and 1 lands on the
    root.  The guard is the slope: where it is negligible (log(c - K) near
    0) the sample is flagged and r'''' = 0 is used.
    """
    base, slope = residual_affine(c, k, kp, r, rp, rpp, rppp)
    if degenerate_mask(c, k, base, slope):
        return 0.0, True
    return -float(base) / float(slope), False


def _shoot(profile, init, tol):
    c = profile.c
    u = profile.u_grid
    trace = []

    def rhs(t, y):
        k, kp, r, rp, rpp, rppp = y
        if c - k <= eps_dom(c, k):
            raise DomainError("profile left the domain during shooting")
        r4, _ = _solve_r4(c, k, kp, r, rp, rpp, rppp)
        return np.array([kp, _kpp(c, k, kp), rp, rpp, rppp, r4])

    y0 = [profile.k_values[0], profile.kprime_values[0], *init]
    try:
        y, m = integrate_uniform(rhs, y0, u, tol)
    except InfeasibleError as exc:
        raise InfeasibleError(f"shooting left the feasible set: {exc}", indices=exc.indices) from exc
    except RuntimeError as exc:
        raise ConvergenceError(str(exc), best=None, history=trace) from exc
    r = y[:, 2:]
    base, slope = residual_affine(c, y[:, 0], y[:, 1], *r.T)
    deg = degenerate_mask(c, profile.k_values, base, slope)
    r4 = np.where(deg, 0.0, -base / np.where(deg, 1.0, slope))
    res = exact_residual(c, y[:, 0], y[:, 1], [*r.T, r4])
    res = np.where(deg, 0.0, res)
    trace.append({"iteration": 0, "substeps": int(m), "max_residual": float(np.max(np.abs(res))),
                  "step": float(profile.h / m) if len(profile) > 1 else 0.0})
    if np.any(deg):
        log.info("shooting met %d degenerate sample(s) where log(c - K) = 0", int(np.sum(deg)))
    return _finish(profile, r, "shooting", deg, trace)


def _finish(profile, r, method, deg, trace):
    c = profile.c
    kr = _kr_jet(c, profile.jet(2), Jet.from_derivatives([r[:, 0], r[:, 1], r[:, 2]])).value
    feasible = (c - kr) > eps_dom(c, kr)
    return ExponentProfile(profile.u_grid, r[:, 0], r[:, 1], r[:, 2], r[:, 3], feasible=feasible,
                           method=method, degenerate=tuple(int(i) for i in np.flatnonzero(deg)),
                           trace=trace)


class _SplineBasis:
    """Quintic splines on the u grid that vanish to third order at u0.

    Basis function i is the fourfold antiderivative (from u0) of the hat
    function of node i, so the unknowns are the nodal values of the fourth
    derivative.  This spans the C^4 quintic splines with the four initial
    values pinned to zero, and keeps the fourth-derivative block the
    identity instead of a matrix with condition number ~ n^4.
    """

    def __init__(self, u):
        n = u.size
        knots = np.concatenate([[u[0]], u, [u[-1]]])
        hat = BSpline(knots, np.eye(n), 1)
        self.design = [hat.antiderivative(4 - m)(u) for m in range(4)] + [np.eye(n)]
        self.u = u


def _collocate(profile, init, tol, max_iter):
    c = profile.c
    u = profile.u_grid
    if len(u) < 6:
        raise ValueError("collocation needs at least six samples")
    basis = _SplineBasis(u)
    # r = T + w: T is the cubic Taylor polynomial of the initial data and w a
    # quintic spline vanishing to third order at u0 (see _SplineBasis)
    du = u - u[0]
    r0, r1, r2, r3 = (float(x) for x in init)
    taylor = [r0 + r1 * du + r2 * du**2 / 2 + r3 * du**3 / 6,
              r1 + r2 * du + r3 * du**2 / 2, r2 + r3 * du, r3 + 0.0 * du, 0.0 * du]
    free = basis.design
    z = np.zeros(free[0].shape[1])
    kj = profile.jet(4)

    def states(zz):
        return [t + d @ zz for t, d in zip(taylor, free)]

    def residual(zz):
        rd = states(zz)
        return _residual_jet(c, kj, Jet.from_derivatives(rd)), rd

    base, slope = residual_affine(c, profile.k_values, profile.kprime_values, *taylor[:4])
    keep = ~degenerate_mask(c, profile.k_values, base, slope)
    trace = []
    mu = 1e-3
    res, rd = residual(z)
    for it in range(max_iter + 1):
        f = res[keep]
        cost = float(np.max(np.abs(f))) if f.size else 0.0
        trace.append({"iteration": it, "max_residual": cost,
                      "l2_residual": float(np.sqrt(np.mean(f**2))) if f.size else 0.0,
                      "damping": mu})
        if cost < tol:
            break
        if it == max_iter:
            raise ConvergenceError(f"collocation did not reach {tol:g} in {max_iter} iterations",
                                   best=np.column_stack(rd[:4]), history=trace)
        jac = _jacobian(c, kj, rd, free)[keep]
        jtj = jac.T @ jac
        g = jac.T @ f
        while True:
            step = np.linalg.solve(jtj + mu * np.diag(np.diag(jtj) + 1e-300), -g)
            try:
                new_res, new_rd = residual(z + step)
                ok = np.sum(new_res[keep] ** 2) < np.sum(f**2)
            except InfeasibleError:
                ok = False
            if ok:
                z, res, rd = z + step, new_res, new_rd
                mu = max(mu / 10.0, 1e-12)
                trace[-1]["step"] = float(np.max(np.abs(step)))
                break
            mu *= 10.0
            if mu > 1e12:
                raise ConvergenceError("collocation step control failed",
                                       best=np.column_stack(rd[:4]), history=trace)
    r = np.column_stack(states(z)[:4])
    return _finish(profile, r, "collocation", ~keep, trace)


def _jacobian(c, kj, rd, free, step=1e-7):
    """dR/dz = sum_m dR/dr^(m) B_m, with the partials by central differences."""
    cols = np.zeros(free[0].shape)
    for m in range(5):
        h = step * np.maximum(1.0, np.abs(rd[m]))
        up = list(rd)
        dn = list(rd)
        up[m] = rd[m] + h
        dn[m] = rd[m] - h
        part = (_residual_jet(c, kj, Jet.from_derivatives(up))
                - _residual_jet(c, kj, Jet.from_derivatives(dn))) / (2.0 * h)
        cols += part[:, None] * free[m]
    return cols


def flat_metric(profile, rprof, s_grid):
    """g_bar = (c - K_r)^{1/2} (c - K)^r g on the (u, s) grid."""
    _aligned(profile, rprof)
    c = profile.c
    kr = kr_of_function_r(profile, rprof).values
    bad = _bad(c, kr)
    if bad:
        raise InfeasibleError(f"c - K_r <= eps_dom at {len(bad)} sample(s)", indices=bad)
    weight = np.sqrt(c - kr) * (c - profile.k_values) ** rprof.r
    return build_metric(profile, s_grid).scaled(weight[:, None], transform="flatten")


def verify_flat(profile, rprof, s_grid=None, tol=None):
    """Curvature of the flattened metric by finite differences; max |K_bar|.

    Default tolerance 1e-3 max |K| at h = 1e-2, tightened as h^2.
    """
    if s_grid is None:
        s_grid = np.linspace(-1.0, 1.0, len(profile))
    grid = flat_metric(profile, rprof, s_grid)
    k_bar = gauss_curvature_fd(grid).values
    kmax = float(np.max(np.abs(profile.k_values)))
    if tol is None:
        tol = refinement_tolerance(1e-3, grid.h) * kmax
    rep = residual_report("verify_flat", k_bar, tol, grid, (grid.u_grid, grid.s_grid),
                          method=rprof.method, degenerate=len(rprof.degenerate))
    return rep


def residual_consistency(profile, rprof, s_grid=None):
    """Gap between flatten_residual and K_bar (c - K_r)^{1/2} (c - K)^r."""
    if s_grid is None:
        s_grid = np.linspace(-1.0, 1.0, len(profile))
    grid = flat_metric(profile, rprof, s_grid)
    k_bar = gauss_curvature_fd(grid).values
    c = profile.c
    kr = kr_of_function_r(profile, rprof).values
    weight = np.sqrt(c - kr) * (c - profile.k_values) ** rprof.r
    return k_bar * weight[:, None] - flatten_residual(profile, rprof).values[:, None]


def flattener_report(profile, rprof, s_grid=None, base_tol=1e-3):
    """verify_flat plus the discrete residual on the u grid.

    Both tolerances are ``base_tol`` max |K| at h = 1e-2, scaled as h^2.
    """
    kmax = float(np.max(np.abs(profile.k_values)))
    flat_h = max(profile.h, float(s_grid[1] - s_grid[0])) if s_grid is not None else profile.h
    flat = verify_flat(profile, rprof, s_grid, tol=refinement_tolerance(base_tol, flat_h) * kmax)
    res = flatten_residual(profile, rprof).values
    rtol = refinement_tolerance(base_tol, profile.h) * kmax
    keep = np.ones(res.size, bool)
    keep[list(rprof.degenerate)] = False
    disc = residual_report("flatten_residual", np.where(keep, res, 0.0), rtol, None,
                           (profile.u_grid,), degenerate=len(rprof.degenerate))
    return combine("flattener", [flat, disc])
