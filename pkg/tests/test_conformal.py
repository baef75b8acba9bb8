import numpy as np
import pytest

from biconserve.conformal import (ConformalFactor, FORMS, conformal_gauss, conformal_laplacian_check,
                                  inverse_ricci_transform, kr3_residual, power_metric_curvature,
                                  ricci_condition, ricci_residual, ricci_transform)
from biconserve.errors import DomainError
from biconserve.grid import MetricGrid
from biconserve.metric import catenoid_fixture
from biconserve.report import interior

from conftest import make_grid, make_profile


@pytest.mark.parametrize("form", ["i", "ii", "iii"])
def test_forms_pass_at_desk_scale(desk, form):
    prof, grid = desk
    rep = ricci_condition(grid, prof.k_values, prof.c, "biconservative", form)
    assert rep.passed, rep.to_json()


@pytest.mark.parametrize("form", ["i", "ii", "iii"])
def test_forms_second_order(form):
    res = []
    for n in (101, 201):
        prof = make_profile(1, n=n)
        res.append(ricci_condition(make_grid(prof), prof.k_values, 1.0, form=form).max_residual)
    assert 3.5 < res[0] / res[1] < 4.5


def test_form_iv_c0(desk0):
    prof, grid = desk0
    rep = ricci_condition(grid, prof.k_values, 0.0, "biconservative", "iv")
    assert rep.passed and rep.max_residual < 1e-3
    with pytest.raises(ValueError):
        ricci_residual(make_grid(make_profile(1, n=11)), make_profile(1, n=11).k_values, 1.0,
                       "biconservative", "iv")


def test_minimal_variant_rejects_biconservative_metric(desk0):
    prof, grid = desk0
    for form in ("i", "ii"):
        assert not ricci_condition(grid, prof.k_values, 0.0, "minimal", form).passed


def test_catenoid_is_a_ricci_surface():
    # the catenoid's curvature varies faster than the desk profiles, so check
    # convergence rather than the desk tolerance
    res = {}
    for n in (101, 201):
        u, v = np.linspace(-1, 1, n), np.linspace(0, 2, n)
        md, k = catenoid_fixture(u, v)
        grid = md.grid(u, v)
        for form in ("i", "ii", "iii", "iv"):
            res.setdefault(form, []).append(ricci_residual(grid, k, 0.0, "minimal", form))
        wrong = ricci_residual(grid, k, 0.0, "biconservative", "ii")
    for form in ("i", "ii", "iv"):
        coarse, fine = (np.max(np.abs(interior(r))) for r in res[form])
        assert 3.5 < coarse / fine < 4.5
    # (c - K)^{1/2} g is flat exactly: cosh^2 u / cosh^2 u (du^2 + dv^2)
    assert np.max(np.abs(interior(res["iii"][1]))) < 1e-10
    assert np.max(np.abs(interior(wrong))) > 0.1


def test_power_metric_curvature_closed_form(desk1):
    # with Lap log(c-K) = -(8/3) K:  K_r = (3 - 4r)/3 K (c-K)^{-r}
    prof, grid = desk1
    c, k = prof.c, prof.k_values[:, None]
    for r in (0.5, 0.75, 1.0):
        got = power_metric_curvature(grid, prof.k_values, c, r).values
        expected = (3 - 4 * r) / 3 * k * (c - k) ** (-r)
        assert np.max(np.abs(interior(got - expected))) < 1e-4


def test_conformal_gauss_stereographic():
    # flat plane with phi = log(2 / (1 + x^2 + y^2)) is the unit sphere
    x = np.linspace(-1, 1, 161)
    one = np.ones((161, 161))
    grid = MetricGrid(x, x, one, 0 * one, one)
    X, Y = grid.mesh()
    fac = ConformalFactor(np.log(2.0 / (1 + X**2 + Y**2)))
    kbar = conformal_gauss(grid, 0.0 * one, fac).values
    assert np.max(np.abs(interior(kbar - 1.0))) < 1e-3
    assert conformal_laplacian_check(grid, fac, np.sin(X) * Y).passed


def test_ricci_transform_c0(desk0):
    prof, grid = desk0
    new_grid, rep = ricci_transform(grid, prof.k_values)
    assert rep.passed and rep.precondition.passed
    names = [c.name for c in rep.report.checks]
    assert "transformed_curvature" in names
    match = rep.report.checks[names.index("transformed_curvature")]
    assert match.max_residual < 1e-3
    _, inv = inverse_ricci_transform(new_grid, -np.sqrt(-prof.k_values) / 3.0)
    assert inv.passed


def test_transform_precondition_fails_for_non_solution():
    prof = make_profile(0, n=101)
    grid = make_grid(prof)
    wrong = prof.k_values * 1.05
    assert np.max(np.abs(kr3_residual(grid, wrong))) > 1e-3
    _, rep = ricci_transform(grid, wrong)
    assert not rep.passed


def test_transform_domain():
    prof = make_profile(1, n=21)
    with pytest.raises(DomainError):
        ricci_transform(make_grid(prof), prof.k_values)


def test_report_serialization(desk0):
    prof, grid = desk0
    d = ricci_condition(grid, prof.k_values, 0.0, form="ii").to_dict()
    assert set(d) >= {"condition", "max_residual", "l2_residual", "grid", "passed", "tolerance"}
    assert FORMS == ("i", "ii", "iii", "iv")
