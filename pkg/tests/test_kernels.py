import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biconserve.kernels import BACKEND, available_backends, get_backend

pytestmark = pytest.mark.skipif("cython" not in available_backends(),
                                reason="compiled kernels not built")

NAMES = ("christoffels", "gauss_curvature", "brioschi")


def random_metric(seed, n=17):
    rng = np.random.default_rng(seed)
    u = np.linspace(0, 1, n)[:, None]
    s = np.linspace(-1, 1, n)[None, :]
    a, b, c = rng.uniform(-0.3, 0.3, 3)
    g11 = 1.5 + a * np.sin(2 * u + s) + 0.1 * s**2
    g12 = 0.2 * b * np.cos(u - s)
    g22 = 1.2 + c * u * s
    f = np.sin(u) * np.cos(2 * s)
    return g11, g12, g22, f, 1.0 / (n - 1), 2.0 / (n - 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(7, 25))
def test_backend_parity(seed, n):
    g11, g12, g22, f, hu, hs = random_metric(seed, n)
    cy, py = get_backend("cython"), get_backend("python")
    for name in NAMES:
        np.testing.assert_allclose(np.asarray(getattr(cy, name)(g11, g12, g22, hu, hs)),
                                   np.asarray(getattr(py, name)(g11, g12, g22, hu, hs)),
                                   rtol=1e-12, atol=1e-12)
    for name in ("laplace_beltrami", "grad_norm_sq"):
        np.testing.assert_allclose(getattr(cy, name)(g11, g12, g22, f, hu, hs),
                                   getattr(py, name)(g11, g12, g22, f, hu, hs),
                                   rtol=1e-12, atol=1e-12)


def test_default_backend_selection():
    forced = os.environ.get("BICONSERVE_KERNELS", "").strip().lower()
    assert BACKEND == (forced or "cython")


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_backend("fortran")
