import numpy as np
import pytest

from biconserve.embedding import (ShapeOperatorField, biconservativity_check, build_shape_operator,
                                  codazzi_check, codazzi_residual, eigenvalue_ratio_check,
                                  embedding_report, frame_connection_tilded_check,
                                  gauss_equation_check, mean_curvature_from_k,
                                  mean_curvature_gradient)
from biconserve.profile import CurvatureProfile

from conftest import make_grid, make_profile


def test_mean_curvature_values():
    prof = CurvatureProfile(0.0, [0.0, 0.1], [-0.75, -0.5], [1.0, 2.0])
    # f = (2/sqrt 3) sqrt(c - K): sqrt(4/3 * 3/4) = 1
    np.testing.assert_allclose(mean_curvature_from_k(prof).values, [1.0, np.sqrt(2 / 3)])
    # X1 f = -K' / sqrt(3 (c - K)): -1/1.5, -2/sqrt(1.5)
    np.testing.assert_allclose(mean_curvature_gradient(prof), [-1 / 1.5, -2 / np.sqrt(1.5)])


def test_shape_operator_invariants(desk):
    prof, grid = desk
    a = build_shape_operator(prof, grid)
    np.testing.assert_allclose(a.trace(), a.f, rtol=1e-14)
    np.testing.assert_allclose(a.det() + prof.c, np.broadcast_to(prof.k_values[:, None], grid.shape),
                               rtol=1e-12, atol=1e-13)
    m = a.coordinate_matrix()
    # coordinate matrix has the same trace and determinant
    np.testing.assert_allclose(m[0, 0] + m[1, 1], a.f, rtol=1e-12)
    np.testing.assert_allclose(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0], a.det(), rtol=1e-10)


def test_embedding_report_passes(desk):
    prof, grid = desk
    rep = embedding_report(prof, grid)
    assert rep.passed, rep.to_json()


def test_identities_at_roundoff(desk):
    prof, grid = desk
    a = build_shape_operator(prof, grid)
    assert gauss_equation_check(prof, grid, a).max_residual < 1e-12
    assert biconservativity_check(prof, grid, a).max_residual < 1e-12
    assert eigenvalue_ratio_check(a).max_residual < 1e-12
    assert frame_connection_tilded_check(prof, grid).passed


def test_codazzi_default_resolution(desk):
    prof, grid = desk
    rep = codazzi_check(prof, grid, build_shape_operator(prof, grid))
    frame = rep.checks[0]
    assert frame.name == "codazzi/frame" and frame.max_residual < 1e-6


def test_codazzi_second_order_stencil_decay():
    res = []
    for n in (101, 201):
        prof = make_profile(1, n=n)
        grid = make_grid(prof)
        _, comp2 = codazzi_residual(prof, grid, build_shape_operator(prof, grid), stencil=3)
        res.append(np.max(np.abs(comp2[2:-2, 2:-2])))
    assert 3.5 < res[0] / res[1] < 4.5


def test_codazzi_exact_derivative_is_roundoff(desk0):
    prof, grid = desk0
    _, comp2 = codazzi_residual(prof, grid, build_shape_operator(prof, grid), fprime="exact")
    assert np.max(np.abs(comp2)) < 1e-12


def test_perturbations_are_detected(desk0):
    prof, grid = desk0
    a = build_shape_operator(prof, grid)
    bumped = ShapeOperatorField(a.f, a.lambda1, a.lambda2 + 0.01 * np.sin(grid.mesh()[0] * 7),
                                a.x1t, a.x2t)
    assert not codazzi_check(prof, grid, bumped).passed
    swapped = a.swapped()
    assert not biconservativity_check(prof, grid, swapped).passed
    assert not eigenvalue_ratio_check(swapped).passed


def test_biconservativity_along_grad_k(desk0):
    # grad K is parallel to grad f, so the same eigen-relation holds
    prof, grid = desk0
    a = build_shape_operator(prof, grid)
    assert biconservativity_check(prof, grid, a, direction="K").max_residual < 1e-12
    with pytest.raises(ValueError):
        biconservativity_check(prof, grid, a, direction="s")
