import warnings

import numpy as np
import pytest

from biconserve.errors import GridTooSmallError, MismatchError
from biconserve.metric import (brioschi_exact, brioschi_fd, build_metric, catenoid_fixture,
                               christoffels_closed_form, christoffels_fd, conformal_u_fixture,
                               flat_fixture, frame_connection_check, frame_orthonormality,
                               gauss_curvature_exact, gauss_curvature_fd, isothermal_coordinate,
                               kappa_closed_form, level_curve_curvature, metric_derivatives,
                               orthogonal_pullback, sphere_fixture, to_isothermal, to_orthogonal)
from biconserve.jets import Jet
from biconserve.profile import CurvatureProfile
from biconserve.report import interior

from conftest import make_grid, make_profile


def curvature_of_a(a, ap):
    # Brioschi on g11 = 1 + a^2 s^2, g12 = a s, g22 = 1, worked in sympy
    return ap - a**2


def test_metric_shape_and_det(desk0):
    prof, grid = desk0
    np.testing.assert_allclose(grid.det, 1.0, atol=1e-14)
    np.testing.assert_array_equal(grid.g22, 1.0)
    assert grid.shape == (201, 201)


def test_curvature_of_non_solution_matches_symbolic_formula():
    # (K, P) with P not equal to K', so the metric is not a biconservative one
    n = 201
    u = np.linspace(0.0, 1.0, n)
    k, dk = -1.3 + 0.3 * (1 - np.cos(u)), 0.3 * np.sin(u)
    p, dp = 0.3 * np.sin(u) + 0.5, 0.3 * np.cos(u)
    prof = CurvatureProfile(0.0, u, k, p)
    grid = build_metric(prof, np.linspace(-1, 1, n))
    a = -3 * p / (8 * (0.0 - k))
    ap = -3 / 8 * (dp * (0.0 - k) + p * dk) / (0.0 - k) ** 2
    got = gauss_curvature_fd(grid).values
    assert np.max(np.abs(interior(got - curvature_of_a(a, ap)[:, None]))) < 1e-4


@pytest.mark.parametrize("key", [0, 1, -1])
def test_round_trip_and_order(key):
    errs = []
    for n in (101, 201):
        prof = make_profile(key, n=n)
        grid = make_grid(prof)
        err = gauss_curvature_fd(grid).values - prof.k_values[:, None]
        errs.append(np.max(np.abs(interior(err))))
    assert errs[1] < 5e-3
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_circle_condition(desk):
    prof, grid = desk
    kfd = level_curve_curvature(grid, prof).values
    assert np.max(np.abs(kfd - kappa_closed_form(grid, prof).values)) < 1e-10
    assert np.max(np.ptp(kfd, axis=1)) < 1e-12


def test_gauss_vs_brioschi_exact(desk):
    prof, grid = desk
    md = metric_derivatives(prof, grid.s_grid)
    k1, k2 = gauss_curvature_exact(md), brioschi_exact(md)
    assert np.max(np.abs(k1 - k2)) < 1e-6
    # both reproduce K itself: the metric is built from an exact solution
    assert np.max(np.abs(k1 - prof.k_values[:, None])) < 1e-8


@pytest.mark.parametrize("fixture,args", [
    (flat_fixture, (np.linspace(0, 1, 11), np.linspace(0, 1, 11))),
    (sphere_fixture, (np.linspace(0.3, 2.8, 21), np.linspace(0, 6, 21))),
    (catenoid_fixture, (np.linspace(-1, 1, 21), np.linspace(0, 6, 21))),
])
def test_fixtures_two_paths(fixture, args):
    md, k = fixture(*args)
    np.testing.assert_allclose(gauss_curvature_exact(md), k, atol=1e-12)
    np.testing.assert_allclose(brioschi_exact(md), k, atol=1e-12)


def test_conformal_u_fixture_formula():
    u = np.linspace(0.1, 1.0, 9)
    lam = Jet.from_derivatives([np.exp(u), np.exp(u), np.exp(u)])
    md, k = conformal_u_fixture(u, np.linspace(0, 1, 5), lam)
    # log lambda = u is linear, so K = 0
    np.testing.assert_allclose(k, 0.0, atol=1e-14)
    np.testing.assert_allclose(gauss_curvature_exact(md), 0.0, atol=1e-13)


@pytest.mark.parametrize("fn", [gauss_curvature_fd, brioschi_fd])
def test_sphere_fd_paths_second_order(fn):
    errs = []
    for n in (101, 201):
        th, ph = np.linspace(0.4, 2.7, n), np.linspace(0.0, 2.0, n)
        md, _ = sphere_fixture(th, ph)
        errs.append(np.max(np.abs(interior(fn(md.grid(th, ph)).values - 1.0))))
    assert errs[1] < 5e-3
    assert 3.0 < errs[0] / errs[1] < 4.5


def test_christoffel_cross_path_order(desk0):
    gaps = []
    for n in (101, 201):
        prof = make_profile(0, n=n)
        grid = make_grid(prof)
        gap = np.abs(christoffels_closed_form(grid, prof).christoffels - christoffels_fd(grid).christoffels)
        gaps.append(np.max(interior(np.max(gap, axis=(0, 1, 2)))))
    assert gaps[1] < 1e-3
    assert 3.0 < gaps[0] / gaps[1] < 5.0


def test_gamma_122_is_minus_kappa(desk0):
    prof, grid = desk0
    gam = christoffels_closed_form(grid, prof).christoffels
    np.testing.assert_allclose(gam[0, 1, 1], -kappa_closed_form(grid, prof).values, atol=1e-13)


def test_frame_checks(desk):
    prof, grid = desk
    assert frame_orthonormality(grid, prof) < 1e-13
    assert frame_connection_check(grid, prof, christoffels_closed_form(grid, prof)).passed
    assert frame_connection_check(grid, prof, christoffels_fd(grid)).passed


def test_orthogonal_chart(desk1):
    prof, grid = desk1
    orth = to_orthogonal(grid, prof)
    np.testing.assert_array_equal(orth.g12, 0.0)
    g11, g12, g22 = orthogonal_pullback(grid, prof)
    for a, b in ((g11, grid.g11), (g12, grid.g12), (g22, grid.g22)):
        assert np.max(np.abs(interior(a - b))) < 1e-4


def test_isothermal_chart_curvature(desk0):
    prof, grid = desk0
    iso = to_isothermal(grid, prof)
    k_iso = gauss_curvature_fd(iso).values
    assert np.max(np.abs(interior(k_iso - iso.meta["K"][:, None]))) < 1e-3
    np.testing.assert_allclose(iso.g11, iso.g22)


def test_isothermal_coordinate_quadrature():
    u = np.linspace(0, 1, 1001)
    ut = isothermal_coordinate(u, np.cos(u), 0.0)
    np.testing.assert_allclose(ut, np.sin(u), atol=1e-8)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        isothermal_coordinate(np.linspace(0, 10, 5), np.exp(np.linspace(0, 10, 5)), 0.0)
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_errors():
    prof = make_profile(0, n=11)
    grid = make_grid(prof, ns=11)
    other = make_profile(0, n=12)
    with pytest.raises(MismatchError):
        kappa_closed_form(grid, other)
    tiny = build_metric(make_profile(0, n=4), np.linspace(-1, 1, 4))
    with pytest.raises(GridTooSmallError):
        gauss_curvature_fd(tiny)
