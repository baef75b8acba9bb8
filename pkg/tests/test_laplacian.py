"""Discrete Laplace-Beltrami and gradient kernels against closed forms (either backend)."""

import numpy as np
import pytest

from biconserve.conformal import grad_norm_sq, laplace_beltrami
from biconserve.grid import MetricGrid
from biconserve.kernels import available_backends, get_backend
from biconserve.report import interior


def flat_grid(n):
    u = np.linspace(0, 1, n)
    s = np.linspace(-1, 1, n)
    one = np.ones((n, n))
    return MetricGrid(u, s, one, 0 * one, one)


def test_flat_laplacian_positive_convention():
    grid = flat_grid(101)
    uu, ss = grid.mesh()
    # Lap = -(d_uu + d_ss); for u^2 + s^2 that is -4
    lap = laplace_beltrami(grid, uu**2 + ss**2).values
    assert np.max(np.abs(interior(lap + 4.0))) < 1e-10


def test_grad_norm_flat():
    grid = flat_grid(101)
    uu, ss = grid.mesh()
    g = grad_norm_sq(grid, 3 * uu - 2 * ss).values
    np.testing.assert_allclose(g, 13.0, rtol=1e-12)


@pytest.mark.parametrize("backend", available_backends())
def test_laplacian_on_sphere(backend):
    # round sphere: Lap cos(theta) = 2 cos(theta)
    k = get_backend(backend)
    errs = []
    for n in (81, 161):
        th, ph = np.linspace(0.5, 2.6, n), np.linspace(0, 1, n)
        T, _ = np.meshgrid(th, ph, indexing="ij")
        one = np.ones_like(T)
        lap = k.laplace_beltrami(one, 0 * one, np.sin(T) ** 2, np.cos(T), th[1] - th[0], ph[1] - ph[0])
        errs.append(np.max(np.abs(interior(lap - 2 * np.cos(T)))))
    assert errs[1] < 1e-3
    assert 3.0 < errs[0] / errs[1] < 5.0
