import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as si

from yvineqr.exceptions import QuadratureError
from yvineqr.quadrature import integrate, integrate_batch


def test_polynomial_exact():
    # Simpson is exact for cubics
    assert integrate(lambda z: 4 * z**3 - z + 2, 0.0, 2.0) == pytest.approx(16 - 2 + 4, abs=1e-13)


def test_smooth_integrals():
    assert integrate(np.exp, 0.0, 1.0, tol=1e-10) == pytest.approx(np.e - 1, abs=1e-9)
    assert integrate(np.sin, 0.0, np.pi, tol=1e-10) == pytest.approx(2.0, abs=1e-9)


def test_batch_limits_and_index():
    a = np.zeros(4)
    b = np.array([0.5, 1.0, 2.0, 0.0])
    scale = np.array([1.0, 2.0, 3.0, 4.0])
    res = integrate_batch(lambda z, i: scale[i] * z, a, b, tol=1e-12)
    np.testing.assert_allclose(res.value, scale * b**2 / 2, atol=1e-12)
    assert not res.hit_max_depth.any()


def test_min_depth_catches_narrow_peak():
    # a peak narrower than the initial panel is missed by the coarse rule
    f = lambda z: np.exp(-((z - 0.37) / 1e-3) ** 2)
    exact = 1e-3 * np.sqrt(np.pi)
    coarse = integrate(f, 0.0, 1.0, tol=1e-6)
    fine = integrate(f, 0.0, 1.0, tol=1e-8, min_depth=8)
    assert abs(coarse - exact) > 1e-4
    assert fine == pytest.approx(exact, abs=1e-8)


def test_failure_raises():
    with pytest.raises(QuadratureError) as info:
        integrate_batch(lambda z, i: 1 / np.sqrt(np.abs(z - 0.3) + 1e-300), [0.0], [1.0],
                        tol=1e-14, max_depth=6)
    assert list(info.value.indices) == [0]


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(0.01, 4), st.floats(0.1, 5))
def test_gaussian_bump(mu, width, length):
    f = lambda z: np.exp(-0.5 * ((z - mu) / width) ** 2)
    ref = si.quad(f, mu - length, mu + length, epsabs=1e-12)[0]
    assert integrate(f, mu - length, mu + length, tol=1e-9, min_depth=4) == pytest.approx(ref, abs=1e-7)
