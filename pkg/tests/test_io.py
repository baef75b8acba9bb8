import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biconserve import io
from biconserve.embedding import build_shape_operator
from biconserve.errors import MismatchError
from biconserve.flattener import ExponentProfile

from conftest import make_grid, make_profile


@pytest.fixture(scope="module")
def small():
    prof = make_profile(0, n=9)
    return prof, make_grid(prof, ns=7)


def test_profile_csv_round_trip(tmp_path, small):
    prof, _ = small
    io.write_profile_csv(prof, tmp_path / "p.csv")
    back = io.read_profile_csv(tmp_path / "p.csv", prof.c)
    np.testing.assert_array_equal(back.k_values, prof.k_values)
    np.testing.assert_array_equal(back.kprime_values, prof.kprime_values)
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "u,K,Kprime"


def test_profile_dict_round_trip(small):
    prof, _ = small
    back = io.profile_from_dict(io.profile_to_dict(prof))
    np.testing.assert_array_equal(back.u_grid, prof.u_grid)


def test_metric_csv_round_trip(tmp_path, small):
    _, grid = small
    io.write_metric_csv(grid, tmp_path / "m.csv")
    back = io.read_metric_csv(tmp_path / "m.csv")
    for name in ("u_grid", "s_grid", "g11", "g12", "g22"):
        np.testing.assert_array_equal(getattr(back, name), getattr(grid, name))
    back2 = io.metric_from_dict(io.metric_to_dict(grid))
    np.testing.assert_array_equal(back2.g12, grid.g12)


def test_metric_csv_rows_shuffled(tmp_path, small):
    _, grid = small
    path = tmp_path / "m.csv"
    io.write_metric_csv(grid, path)
    lines = path.read_text().splitlines()
    body = lines[1:]
    np.random.default_rng(0).shuffle(body)
    path.write_text("\n".join([lines[0]] + body) + "\n")
    np.testing.assert_array_equal(io.read_metric_csv(path).g11, grid.g11)


def test_bad_header_and_incomplete_grid(tmp_path, small):
    _, grid = small
    (tmp_path / "bad.csv").write_text("u,s,E,F,G\n0,0,1,0,1\n")
    with pytest.raises(MismatchError):
        io.read_metric_csv(tmp_path / "bad.csv")
    path = tmp_path / "m.csv"
    io.write_metric_csv(grid, path)
    path.write_text("\n".join(path.read_text().splitlines()[:-1]) + "\n")
    with pytest.raises(MismatchError):
        io.read_metric_csv(path)


def test_scalar_exponent_shape(tmp_path, small):
    prof, grid = small
    vals = np.arange(63.0).reshape(9, 7)
    io.write_scalar_csv(vals, grid, tmp_path / "s.csv")
    _, _, back = io.read_scalar_csv(tmp_path / "s.csv")
    np.testing.assert_array_equal(back, vals)
    ex = ExponentProfile(prof.u_grid, prof.u_grid**2, 2 * prof.u_grid, 2.0, 0.0)
    io.write_exponent_csv(ex, tmp_path / "r.csv")
    np.testing.assert_array_equal(io.read_exponent_csv(tmp_path / "r.csv").rprime, ex.rprime)
    io.write_shape_csv(build_shape_operator(prof, grid), grid, tmp_path / "a.csv")
    assert (tmp_path / "a.csv").read_text().startswith("u,s,f,lambda1,lambda2\n")


def test_dat_tables(tmp_path, small):
    prof, grid = small
    io.write_dat(tmp_path / "x.dat", {"u": prof.u_grid, "K": prof.k_values}, comment="hi")
    data = np.loadtxt(tmp_path / "x.dat")
    np.testing.assert_array_equal(data[:, 1], prof.k_values)
    io.write_grid_dat(tmp_path / "g.dat", grid, grid.g12, "g12")
    assert np.loadtxt(tmp_path / "g.dat").shape == (63, 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=3, max_size=12))
def test_floats_round_trip_exactly(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    n = len(vals)
    ex = ExponentProfile(np.arange(n, dtype=float), vals, vals, vals, vals)
    io.write_exponent_csv(ex, path)
    np.testing.assert_array_equal(io.read_exponent_csv(path).r, np.array(vals))
