"""Curvature profiles K(u) of non-CMC biconservative metrics.

Along an integral curve of grad K / |grad K| the Gaussian curvature obeys

    24 (c - K) K'' + 33 K'^2 + 64 K (c - K)^2 = 0,

with c the sectional curvature of the ambient space form.  This module
integrates that ODE, stores K and K' on a uniform u grid, and evaluates the
equivalent Laplacian form

    (c - K) Lap K - |grad K|^2 - (8/3) K (c - K)^2 = 0

in the frame where Lap h = -h'' - (3 K' / (8 (c - K))) h' for u-only h.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError
from .jets import Jet
from .ode import MAX_SUBSTEPS, integrate_uniform

log = logging.getLogger(__name__)

EPS_DOM_REL = 1e-6


def eps_dom(c, k):
    """Exclusion margin around the singular sets c - K = 0 and K' = 0."""
    return EPS_DOM_REL * np.maximum(1.0, np.maximum(abs(c), np.abs(k)))


def check_domain(c, k, what="c - K"):
    k = np.asarray(k, dtype=float)
    bad = (c - k) <= eps_dom(c, k)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))
        raise DomainError(f"{what} <= eps_dom at {idx.size} sample(s), first index {idx[0]}")


def _kpp(c, k, kp):
    # works for floats, arrays and Jets
    return -(33.0 * kp * kp + 64.0 * k * (c - k) * (c - k)) / (24.0 * (c - k))


def ode_rhs(c, k, kprime):
    """K'' from the curvature ODE.  Vectorizes over ``k`` and ``kprime``."""
    check_domain(c, k)
    return _kpp(c, np.asarray(k, dtype=float), np.asarray(kprime, dtype=float))[()]


def curvature_jet(c, k, kprime, order):
    """Taylor jet of K(u) of the given order, generated by the ODE itself.

    ``k`` and ``kprime`` may be arrays; the returned jet then carries one
    expansion per sample.
    """
    check_domain(c, k)
    coeffs = [np.asarray(k, dtype=float)[()], np.asarray(kprime, dtype=float)[()]]
    for m in range(1, order):
        kj = Jet(coeffs)
        kpp = _kpp(c, kj, kj.diff())
        # kpp has order m-1; its top coefficient is K^(m+1) / (m-1)!
        coeffs.append(kpp.coeffs[m - 1] / (m * (m + 1)))
    return Jet(coeffs[: order + 1])


@dataclass(frozen=True)
class CurvatureProfile:
    """K(u) and K'(u) sampled on a uniform, strictly increasing u grid."""

    c: float
    u_grid: np.ndarray
    k_values: np.ndarray
    kprime_values: np.ndarray
    truncated: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("u_grid", "k_values", "kprime_values"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = self.u_grid.size
        if self.k_values.size != n or self.kprime_values.size != n:
            raise ValueError("u_grid, k_values and kprime_values must have equal length")
        if n > 1 and np.any(np.diff(self.u_grid) <= 0):
            raise ValueError("u_grid must be strictly increasing")
        check_domain(self.c, self.k_values)
        if np.any(self.kprime_values <= eps_dom(self.c, self.k_values)):
            raise DomainError("K' <= eps_dom somewhere on the profile")

    def __len__(self):
        return self.u_grid.size

    @property
    def h(self):
        return float(self.u_grid[1] - self.u_grid[0]) if len(self) > 1 else 0.0

    @property
    def ksecond_values(self):
        return _kpp(self.c, self.k_values, self.kprime_values)

    def jet(self, order):
        return curvature_jet(self.c, self.k_values, self.kprime_values, order)

    def kappa(self):
        """Geodesic curvature 3 K' / (8 (c - K)) of the level curves of K."""
        return 3.0 * self.kprime_values / (8.0 * (self.c - self.k_values))

    def frame_laplacian(self, hprime, hsecond):
        """Lap h = -h'' - kappa h' for a u-only function (positive convention)."""
        return -np.asarray(hsecond) - self.kappa() * np.asarray(hprime)


def integrate_profile(c, k0, kprime0, u_span, tol=1e-10, n=201):
    """Integrate the curvature ODE from (k0, kprime0) over ``u_span``.

    DOP853 with dense output, local error controlled by ``tol``.  The run
    stops short of c - K or K' falling to twice the exclusion margin; the
    returned profile then records ``truncated=True``.  Samples are ``n``
    uniformly spaced points on the (possibly shortened) span.
    """
    c, k0, kprime0 = float(c), float(k0), float(kprime0)
    u0, u1 = (float(x) for x in u_span)
    if c - k0 <= eps_dom(c, k0):
        raise DomainError(f"initial data has c - K = {c - k0:g} <= eps_dom")
    if kprime0 <= eps_dom(c, k0):
        raise DomainError(f"initial data has K' = {kprime0:g} <= eps_dom")
    if u1 < u0:
        raise ValueError("u_span must be increasing")
    if u1 == u0:
        return CurvatureProfile(c, [u0], [k0], [kprime0], meta={"tol": tol})

    def rhs(u, y):
        return [y[1], _kpp(c, y[0], y[1])]

    def hit_c(u, y):
        return (c - y[0]) - 2.0 * eps_dom(c, y[0])

    def hit_kp(u, y):
        return y[1] - 2.0 * eps_dom(c, y[0])

    hit_c.terminal = hit_kp.terminal = True
    hit_c.direction = hit_kp.direction = -1

    sol = solve_ivp(rhs, (u0, u1), [k0, kprime0], method="DOP853", rtol=tol, atol=tol,
                    dense_output=True, events=(hit_c, hit_kp))
    if sol.status < 0:
        raise DomainError(f"integration failed: {sol.message}")
    truncated = sol.status == 1
    u_end = float(sol.t[-1])
    meta = {"tol": tol, "requested_span": [u0, u1], "nfev": int(sol.nfev)}
    if truncated:
        which = "c - K" if sol.t_events[0].size else "K'"
        # back off one sample so the last stored point stays clear of the margin
        u_end = u0 + (u_end - u0) * (1.0 - 1.0 / max(n, 2))
        meta["truncation"] = f"{which} reached the exclusion margin near u = {sol.t[-1]:.6g}"
        log.info("profile truncated: %s", meta["truncation"])
    u = np.linspace(u0, u_end, n)
    # resample with equal substeps per grid interval so sample errors stay smooth in u
    h_min = float(np.min(np.diff(sol.t))) if sol.t.size > 1 else (u_end - u0)
    start = max(1, int(np.ceil((u[1] - u[0]) / max(h_min, 1e-300) / 4))) if n > 1 else 1
    y, m = integrate_uniform(rhs, [k0, kprime0], u, tol, substeps=min(start, MAX_SUBSTEPS))
    meta["substeps"] = m
    return CurvatureProfile(c, u, y[:, 0], y[:, 1], truncated=truncated, meta=meta)


def _fd_weights(offsets, deriv):
    offsets = np.asarray(offsets, dtype=float)
    m = offsets.size
    vander = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[deriv] = np.prod(np.arange(1, deriv + 1))
    return np.linalg.solve(vander, rhs)


def high_order_derivative(values, h, width=7):
    """First derivative along axis 0 of uniformly sampled data, ``width``-point stencil.

    Centered in the interior, shifted one-sided near the ends; accuracy is
    O(h^(width-1)).
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    width = min(width, n)
    if width < 2:
        raise ValueError("need at least two samples to differentiate")
    half = width // 2
    out = np.empty_like(values)
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        offs = np.arange(start, start + width) - i
        out[i] = np.tensordot(_fd_weights(offs, 1), values[start:start + width], axes=1) / h
    return out


def pde_residual(profile, ksecond=None):
    """(c - K) Lap K - |grad K|^2 - (8/3) K (c - K)^2 along the profile.

    ``ksecond`` defaults to a 7-point differentiation of the stored K'
    samples, so the residual measures how well the stored data satisfy the
    ODE rather than restating it.
    """
    c, k, kp = profile.c, profile.k_values, profile.kprime_values
    check_domain(c, k)
    if ksecond is None:
        if len(profile) < 2:
            ksecond = profile.ksecond_values
        else:
            ksecond = high_order_derivative(kp, profile.h)
    ksecond = np.asarray(ksecond, dtype=float)
    lap_k = -ksecond - 3.0 * kp**2 / (8.0 * (c - k))
    return (c - k) * lap_k - kp**2 - (8.0 / 3.0) * k * (c - k) ** 2
