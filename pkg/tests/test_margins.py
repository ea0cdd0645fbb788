import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats
from scipy.integrate import trapezoid

from yvineqr import margins as mg
from yvineqr.exceptions import DomainError, FitError


@pytest.fixture(scope="module")
def normal_model():
    return mg.fit_marginal(np.random.default_rng(0).normal(size=10000))


samples = arrays(np.float64, st.integers(10, 80),
                 elements=st.floats(-1e3, 1e3, allow_nan=False)).filter(lambda a: np.unique(a).size >= 3
                                                                       and np.ptp(a) > 1e-3)


def test_grid_invariants(normal_model):
    m = normal_model
    assert m.grid.size == mg.GRID_SIZE
    assert np.all(np.diff(m.grid) > 0)
    assert m.cdf_values[0] <= 1e-6
    assert m.cdf_values[-1] >= 1 - 1e-6
    assert np.all(m.density_values >= 0)
    assert trapezoid(m.density_values, m.grid) == pytest.approx(1.0, abs=1e-3)


def test_silverman_bandwidth():
    x = np.random.default_rng(1).normal(3, 2, size=400)
    assert mg.silverman_bandwidth(x) == pytest.approx(1.06 * np.std(x, ddof=1) * 400 ** -0.2)
    assert mg.fit_marginal(x).bandwidth == pytest.approx(mg.silverman_bandwidth(x))


def test_cdf_is_kernel_mixture():
    x = np.array([0.0, 1.0, 3.0, 4.5, 7.0, 7.5, 8.0, 10.0, 11.0, 15.0])
    m = mg.fit_marginal(x)
    t = np.array([-2.0, 5.0, 9.3])
    ref = stats.norm.cdf((t[:, None] - x[None, :]) / m.bandwidth).mean(axis=1)
    np.testing.assert_allclose(m.cdf(t), ref, atol=1e-15)
    dens = stats.norm.pdf((t[:, None] - x[None, :]) / m.bandwidth).mean(axis=1) / m.bandwidth
    np.testing.assert_allclose(m.pdf(t), dens, rtol=1e-13)


def test_standard_normal_median(normal_model):
    assert 0.48 <= normal_model.pit(0.0) <= 0.52


def test_ten_points_strictly_increasing():
    m = mg.fit_marginal(np.random.default_rng(2).normal(size=10))
    assert np.all(np.diff(m.cdf_values) > 0)


# unbounded supports only: the Gaussian kernel leaks mass across a support boundary
@pytest.mark.parametrize("gen", [
    lambda r: r.normal(size=800), lambda r: r.standard_t(3, size=800), lambda r: r.logistic(size=800),
    lambda r: np.concatenate([r.normal(-2, 1, 400), r.normal(2, 1, 400)]),
])
def test_pit_of_training_sample_is_uniform(gen):
    x = gen(np.random.default_rng(3))
    u = mg.fit_marginal(x).pit(x)
    ks = stats.kstest(u, "uniform").statistic
    assert ks < 1.36 / np.sqrt(x.size) + 0.02


def test_tail_clamping(normal_model):
    assert normal_model.pit(-100.0) == mg.PIT_CLAMP
    assert normal_model.pit(100.0) == 1 - mg.PIT_CLAMP
    assert normal_model.pit(normal_model.grid[0] - 1) <= 1e-6


def test_symmetric_sample_median():
    a = np.linspace(1, 5, 20)
    m = mg.fit_marginal(np.concatenate([-a, a]))
    assert m.pit(0.0) == pytest.approx(0.5, abs=1e-9)


def test_round_trip_interior(normal_model):
    m = normal_model
    span = m.grid[-1] - m.grid[0]
    x = np.random.default_rng(4).uniform(-3, 3, size=100)
    assert np.max(np.abs(m.pit_inverse(m.pit(x)) - x)) < 1e-6 * span


def test_pit_inverse_clamps_to_grid(normal_model):
    m = normal_model
    assert m.pit_inverse(0.0) == m.grid[0]
    assert m.pit_inverse(1.0) == m.grid[-1]
    with pytest.raises(DomainError):
        m.pit_inverse(1.5)


def test_ties_are_jittered():
    x = np.array([1.0] * 5 + [2.0] * 5 + [3.0, 4.0, 5.0])
    m = mg.fit_marginal(x)
    assert np.unique(m.data).size == x.size
    assert np.all(np.diff(m.cdf_values) > 0)
    assert np.max(np.abs(np.sort(m.data) - np.sort(x))) <= 5 * 1e-9 * np.ptp(x)


@pytest.mark.parametrize("bad", [np.ones(20), np.arange(5.0), np.array([1.0, 2.0] * 10),
                                 np.array([np.nan] + list(range(20)))])
def test_fit_errors(bad):
    with pytest.raises(FitError):
        mg.fit_marginal(bad)


def test_dict_round_trip_is_exact(normal_model):
    m2 = mg.MarginalModel.from_dict(normal_model.to_dict())
    x = np.linspace(-4, 4, 17)
    np.testing.assert_array_equal(m2.pit(x), normal_model.pit(x))
    assert isinstance(mg.marginal_from_dict(mg.UniformMarginal().to_dict()), mg.UniformMarginal)


def test_uniform_marginal():
    u = mg.UniformMarginal()
    assert u.pit(0.3) == 0.3
    assert u.pit(0.0) == mg.PIT_CLAMP
    assert u.pit_inverse(0.7) == 0.7
    assert mg.pit(u, 0.25) == 0.25


@settings(max_examples=40, deadline=None)
@given(samples)
def test_pit_monotone(x):
    m = mg.fit_marginal(x)
    t = np.sort(np.linspace(x.min() - 1, x.max() + 1, 50))
    u = m.pit(t)
    assert np.all(np.diff(u) >= 0)
    assert np.all((u >= mg.PIT_CLAMP) & (u <= 1 - mg.PIT_CLAMP))


@settings(max_examples=40, deadline=None)
@given(samples, st.floats(0.01, 0.99))
def test_pit_inverse_round_trip(x, v):
    m = mg.fit_marginal(x)
    assert m.pit(m.pit_inverse(v)) == pytest.approx(v, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(samples)
def test_grid_invariants_hold(x):
    m = mg.fit_marginal(x)
    assert m.cdf_values[0] <= 1e-6 and m.cdf_values[-1] >= 1 - 1e-6
    assert trapezoid(m.density_values, m.grid) == pytest.approx(1.0, abs=1e-3)
