import json

import numpy as np
from hypothesis import given, strategies as st

from biconserve.report import (Report, band_covers, coarse_tolerance, combine, interior,
                               refinement_tolerance, residual_report)


def test_refinement_tolerance_scaling():
    assert refinement_tolerance(1e-3, 1e-2) == 1e-3
    assert np.isclose(refinement_tolerance(1e-3, 5e-3), 2.5e-4)


def test_coarse_tolerance_never_tightens():
    assert coarse_tolerance(1e-7, 1e-3) == 1e-7
    assert np.isclose(coarse_tolerance(1e-7, 2e-2, order=6), 6.4e-6)


def test_interior_and_location():
    r = np.zeros((9, 9))
    r[4, 5] = -3.0
    r[0, 0] = 100.0   # edge band, ignored by max
    rep = residual_report("x", r, 1.0, coords=(np.arange(9.0), np.arange(9.0) * 2))
    assert rep.max_residual == 3.0 and not rep.passed
    assert rep.location == [4.0, 10.0]
    assert rep.boundary_max == 100.0
    assert interior(r).shape == (5, 5)


def test_band_covers_marks_not_evaluated():
    rep = residual_report("x", np.ones((5, 5)) * 7, 1.0, boundary_width=4)
    assert band_covers((5, 5), 4) and rep.status == "n/a" and rep.passed
    assert "not_evaluated" in rep.details


def test_combine_picks_worst_ratio():
    a = Report("a", 1.0, 1.0, 10.0, True)
    b = Report("b", 0.5, 0.5, 1.0, True)
    c = Report("c", 0.0, 0.0, 0.0, True, status="n/a")
    out = combine("all", [a, b, c])
    assert out.passed and out.details["worst_check"] == "b"
    assert not combine("all", [a, Report("d", 2, 2, 1, False)]).passed


def test_json_is_strict():
    rep = Report("e", float("inf"), float("nan"), 0.0, False, status="error")
    d = json.loads(json.dumps(rep.to_dict(), allow_nan=False))
    assert d["max_residual"] is None


@given(st.lists(st.floats(-1e6, 1e6), min_size=6, max_size=40))
def test_max_bounds_l2(vals):
    rep = residual_report("r", np.array(vals), np.inf, boundary_width=1)
    assert rep.l2_residual <= rep.max_residual + 1e-9 * max(1.0, rep.max_residual)
