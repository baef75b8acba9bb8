import numpy as np
import pytest

from biconserve.ode import MAX_SUBSTEPS, dopri_step, integrate_uniform


def test_dopri_step_fifth_order():
    # y' = y: local error of a fifth-order step scales as h^6
    errs = []
    for h in (0.1, 0.05):
        y, _ = dopri_step(lambda u, y: y, 0.0, np.array([1.0]), h)
        errs.append(abs(y[0] - np.exp(h)))
    assert 45 < errs[0] / errs[1] < 80


def test_integrate_uniform_exponential():
    u = np.linspace(0.0, 1.0, 11)
    y, m = integrate_uniform(lambda t, y: y, [1.0], u, 1e-12)
    np.testing.assert_allclose(y[:, 0], np.exp(u), rtol=1e-11)
    assert m >= 1


def test_integrate_uniform_harmonic_oscillator():
    u = np.linspace(0.0, 2 * np.pi, 41)
    y, _ = integrate_uniform(lambda t, y: np.array([y[1], -y[0]]), [0.0, 1.0], u, 1e-11)
    np.testing.assert_allclose(y[:, 0], np.sin(u), atol=1e-9)


def test_single_point_grid():
    y, m = integrate_uniform(lambda t, y: y, [2.0], np.array([0.0]), 1e-8)
    assert y.shape == (1, 1) and m == 0


def test_blowup_raises():
    # y' = y^2 from 1 blows up at t = 1
    with pytest.raises(RuntimeError):
        integrate_uniform(lambda t, y: y * y, [1.0], np.linspace(0, 1.5, 4), 1e-8)
    assert MAX_SUBSTEPS >= 1024
