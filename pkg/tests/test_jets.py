import math

import numpy as np
from hypothesis import given, settings, strategies as st

from biconserve import jets
from biconserve.jets import Jet

finite = st.floats(-2.0, 2.0, allow_nan=False)


def poly_jet(coeffs, order):
    """Jet of a polynomial at 0 (coefficients are already normalized Taylor terms)."""
    c = list(coeffs) + [0.0] * (order + 1 - len(coeffs))
    return Jet(c[: order + 1])


def test_exp_of_identity_jet():
    # exp(x) at x = 0.3: every derivative equals e^0.3
    x = Jet.from_derivatives([0.3, 1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(jets.exp(x).derivatives(), [math.exp(0.3)] * 5, rtol=1e-14)


def test_log_and_sqrt_derivatives():
    x = Jet.from_derivatives([2.0, 1.0, 0.0, 0.0])
    # d^k log x = (-1)^(k-1) (k-1)! / x^k
    np.testing.assert_allclose(jets.log(x).derivatives(),
                               [math.log(2.0), 0.5, -0.25, 0.25], rtol=1e-14)
    # sqrt: x^(1/2), 1/2 x^(-1/2), -1/4 x^(-3/2), 3/8 x^(-5/2)
    np.testing.assert_allclose(jets.sqrt(x).derivatives(),
                               [2**0.5, 0.5 * 2**-0.5, -0.25 * 2**-1.5, 0.375 * 2**-2.5], rtol=1e-14)


def test_diff_lowers_order():
    j = Jet([1.0, 2.0, 3.0])
    d = j.diff()
    assert d.order == 1
    assert d.coeffs == [2.0, 6.0]


@given(st.lists(finite, min_size=4, max_size=4), st.lists(finite, min_size=4, max_size=4))
def test_product_rule(a, b):
    ja, jb = Jet(a), Jet(b)
    lhs = (ja * jb).diff()
    rhs = ja.diff() * jb.truncate(2) + ja.truncate(2) * jb.diff()
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@settings(max_examples=50)
@given(st.lists(finite, min_size=4, max_size=4), st.floats(0.5, 3.0))
def test_division_inverts_multiplication(a, b0):
    ja = Jet(a)
    jb = Jet([b0, 0.3, -0.2, 0.1])
    back = (ja / jb) * jb
    np.testing.assert_allclose(back.coeffs, ja.coeffs, atol=1e-11)


@given(st.floats(0.2, 3.0))
def test_exp_log_round_trip(x0):
    x = Jet.from_derivatives([x0, 0.7, -0.4, 0.2])
    np.testing.assert_allclose(jets.exp(jets.log(x)).coeffs, x.coeffs, rtol=1e-12, atol=1e-12)


def test_vectorized_coefficients():
    x = Jet.from_derivatives([np.array([1.0, 2.0]), np.array([1.0, 1.0])])
    out = jets.log(x)
    np.testing.assert_allclose(out.derivative(1), [1.0, 0.5])
