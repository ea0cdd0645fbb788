import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from yvineqr import paircop as pc
from yvineqr._bvn import bvn_cdf
from yvineqr.exceptions import DomainError, FitError

S = pc.PairCopulaSpec

unit = st.floats(0.02, 0.98)


@st.composite
def specs(draw, families=None):
    fam = draw(st.sampled_from(families or [f for f in pc.ALL_FAMILIES if f is not pc.Family.INDEPENDENCE]))
    rot = draw(st.sampled_from(pc.ROTATIONS))
    if fam is pc.Family.GAUSSIAN:
        params = (draw(st.floats(-0.9, 0.9)),)
    elif fam is pc.Family.STUDENT:
        params = (draw(st.floats(-0.9, 0.9)), draw(st.floats(2.5, 25.0)))
    elif fam is pc.Family.CLAYTON:
        params = (draw(st.floats(0.1, 10.0)),)
    elif fam is pc.Family.FRANK:
        params = (draw(st.floats(0.2, 20.0)) * draw(st.sampled_from([-1.0, 1.0])),)
    else:
        params = (draw(st.floats(1.05, 6.0)),)
    return S(fam, rot, params)


fast_specs = specs([pc.Family.GAUSSIAN, pc.Family.CLAYTON, pc.Family.GUMBEL, pc.Family.FRANK, pc.Family.JOE])


# values below come from mpmath at 30 digits: closed forms, their symbolic
# derivatives, and 1-d quadrature of the normal and t conditional laws
@pytest.mark.parametrize("spec,u,v,expected", [
    (S("clayton", 0, (2.0,)), 0.3, 0.7, 0.2868649025057026209),
    (S("gumbel", 0, (1.5,)), 0.3, 0.7, 0.26443888022048576248),
    (S("frank", 0, (-4.0,)), 0.2, 0.9, 0.14887895739354412016),
    (S("joe", 0, (3.0,)), 0.25, 0.8, 0.24726921424790758623),
    (S("gaussian", 0, (0.6,)), 0.3, 0.8, 0.2895206996492478657),
])
def test_cdf_oracle(spec, u, v, expected):
    assert pc.cdf(spec, u, v) == pytest.approx(expected, abs=1e-14)


def test_student_cdf_oracle():
    assert pc.cdf(S("student", 0, (0.5, 4.0)), 0.3, 0.8) == pytest.approx(0.27680779419029593813, abs=1e-10)


def test_bvn_oracle():
    assert bvn_cdf(1.0, -0.5, -0.7) == pytest.approx(0.18704893398126544385, abs=1e-14)


def test_bvn_matches_scipy():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=(2, 20))
    for r in (-0.95, -0.3, 0.0, 0.5, 0.99):
        ref = stats.multivariate_normal([0, 0], [[1, r], [r, 1]]).cdf(np.column_stack([x, y]))
        np.testing.assert_allclose(bvn_cdf(x, y, r), ref, atol=1e-7)


def test_density_and_h_oracles():
    assert pc.pdf(S("frank", 0, (6.0,)), 0.4, 0.55) == pytest.approx(1.3504191086824337462, abs=1e-13)
    assert pc.hfunc(S("gumbel", 0, (2.0,)), "2|1", 0.6, 0.3) == pytest.approx(0.82973438317288736468, abs=1e-14)
    assert pc.hfunc(S("joe", 0, (3.0,)), "1|2", 0.25, 0.8) == pytest.approx(0.04081336323685143283, abs=1e-14)


def test_gaussian_h_closed_form():
    rho = 0.7
    spec = S("gaussian", 0, (rho,))
    u, v = np.meshgrid(np.linspace(0.05, 0.95, 7), np.linspace(0.05, 0.95, 7))
    ref = stats.norm.cdf((stats.norm.ppf(u) - rho * stats.norm.ppf(v)) / np.sqrt(1 - rho**2))
    np.testing.assert_allclose(pc.hfunc(spec, "1|2", u, v), ref, atol=1e-14)


@pytest.mark.parametrize("spec,expected", [
    (S("frank", 0, (5.0,)), 0.45670095816011689683),
    (S("joe", 0, (3.0,)), 0.5179624982298887764),
    (S("joe", 0, (2.0,)), 2.0 - np.pi**2 / 6.0),
    (S("clayton", 0, (3.0,)), 0.6),
    (S("gumbel", 0, (5.0,)), 0.8),
    (S("gaussian", 0, (0.5,)), 1.0 / 3.0),
    (S("clayton", 90, (3.0,)), -0.6),
    (S("gumbel", 270, (2.0,)), -0.5),
    (S("independence"), 0.0),
])
def test_kendall_tau(spec, expected):
    assert pc.kendall_tau(spec) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("spec", [
    S("gaussian", 0, (0.5,)), S("student", 0, (-0.4, 5.0)), S("clayton", 0, (2.0,)),
    S("clayton", 90, (2.0,)), S("clayton", 180, (2.0,)), S("clayton", 270, (2.0,)),
    S("gumbel", 0, (2.5,)), S("gumbel", 180, (2.5,)), S("frank", 0, (-6.0,)),
    S("joe", 0, (2.0,)), S("joe", 270, (2.0,)),
])
def test_pdf_is_mixed_derivative_of_cdf(spec):
    h = 1e-4
    for u, v in [(0.3, 0.6), (0.7, 0.2), (0.5, 0.5)]:
        fd = (pc.cdf(spec, u + h, v + h) - pc.cdf(spec, u + h, v - h)
              - pc.cdf(spec, u - h, v + h) + pc.cdf(spec, u - h, v - h)) / (4 * h * h)
        assert pc.pdf(spec, u, v) == pytest.approx(fd, rel=1e-4)


@pytest.mark.parametrize("rot", pc.ROTATIONS)
def test_rotation_conventions(rot):
    base = S("clayton", 0, (2.0,))
    spec = S("clayton", rot, (2.0,))
    u, v = 0.3, 0.65
    expected = {
        0: pc.cdf(base, u, v),
        90: v - pc.cdf(base, 1 - u, v),
        180: u + v - 1 + pc.cdf(base, 1 - u, 1 - v),
        270: u - pc.cdf(base, u, 1 - v),
    }[rot]
    assert pc.cdf(spec, u, v) == pytest.approx(expected, abs=1e-15)


def test_h_matches_cdf_derivative():
    spec = S("gumbel", 90, (2.0,))
    h = 1e-6
    u, v = 0.35, 0.6
    d_dv = (pc.cdf(spec, u, v + h) - pc.cdf(spec, u, v - h)) / (2 * h)
    d_du = (pc.cdf(spec, u + h, v) - pc.cdf(spec, u - h, v)) / (2 * h)
    assert pc.hfunc(spec, "1|2", u, v) == pytest.approx(d_dv, abs=1e-8)
    assert pc.hfunc(spec, "2|1", v, u) == pytest.approx(d_du, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(fast_specs, unit, unit, st.sampled_from(["1|2", "2|1"]))
def test_hinv_round_trip(spec, w, b, which):
    a = pc.hinv(spec, which, w, b)
    assert 0.0 <= a <= 1.0
    assert pc.hfunc(spec, which, a, b) == pytest.approx(w, abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(specs([pc.Family.STUDENT]), unit, unit)
def test_student_hinv_round_trip(spec, w, b):
    assert pc.hfunc(spec, "1|2", pc.hinv(spec, "1|2", w, b), b) == pytest.approx(w, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(fast_specs, unit, unit)
def test_cdf_frechet_bounds_and_margins(spec, u, v):
    c = pc.cdf(spec, u, v)
    assert max(u + v - 1.0, 0.0) - 1e-12 <= c <= min(u, v) + 1e-12
    assert pc.cdf(spec, u, 1.0) == pytest.approx(u, abs=1e-12)
    assert pc.cdf(spec, 1.0, v) == pytest.approx(v, abs=1e-12)
    assert pc.cdf(spec, 0.0, v) == 0.0


@settings(max_examples=60, deadline=None)
@given(fast_specs, unit, st.lists(unit, min_size=2, max_size=8))
def test_h_and_cdf_monotone(spec, b, grid):
    a = np.sort(np.array(grid))
    assert np.all(np.diff(pc.hfunc(spec, "1|2", a, b)) >= -1e-14)
    assert np.all(np.diff(pc.cdf(spec, a, b)) >= -1e-14)


@settings(max_examples=40, deadline=None)
@given(fast_specs, unit, unit)
def test_swap_exchanges_arguments(spec, u, v):
    sw = pc.swap(spec)
    assert pc.cdf(sw, v, u) == pytest.approx(pc.cdf(spec, u, v), abs=1e-12)
    assert pc.hfunc(sw, "2|1", u, v) == pytest.approx(pc.hfunc(spec, "1|2", u, v), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([pc.Family.CLAYTON, pc.Family.GUMBEL, pc.Family.FRANK, pc.Family.JOE,
                        pc.Family.GAUSSIAN]), st.floats(0.05, 0.85), st.sampled_from([1.0, -1.0]))
def test_tau_map_round_trip(fam, t, sign):
    spec = pc.tau_to_param(fam, sign * t)
    assert pc.kendall_tau(spec) == pytest.approx(sign * t, abs=1e-10)


def test_rotated_tau_sign():
    for rot in pc.ROTATIONS:
        spec = S("joe", rot, (2.5,))
        sign = -1 if rot in (90, 270) else 1
        assert pc.kendall_tau(spec) == pytest.approx(sign * pc.kendall_tau(S("joe", 0, (2.5,))))


@pytest.mark.parametrize("bad", [
    ("clayton", 0, (-1.0,)), ("gumbel", 0, (0.5,)), ("gaussian", 0, (1.0,)),
    ("student", 0, (0.5, 1.5)), ("frank", 0, (0.0,)), ("clayton", 45, (1.0,)),
    ("clayton", 0, ()), ("bb1", 0, (1.0, 1.0)),
])
def test_invalid_specs(bad):
    with pytest.raises(DomainError):
        S(*bad)


def test_spec_dict_round_trip():
    spec = S("student", 0, (0.123456789012345678, 7.5))
    assert S.from_dict(spec.to_dict()) == spec


def test_sampled_tau_matches():
    for spec in [S("clayton", 180, (2.0,)), S("gumbel", 90, (3.0,)), S("student", 0, (0.6, 4.0))]:
        x = pc.sample(spec, 4000, seed=3)
        assert stats.kendalltau(x[:, 0], x[:, 1]).statistic == pytest.approx(spec.tau, abs=0.03)


def test_sample_deterministic():
    spec = S("frank", 0, (3.0,))
    np.testing.assert_array_equal(pc.sample(spec, 50, seed=9), pc.sample(spec, 50, seed=9))


@pytest.mark.parametrize("spec", [
    S("gaussian", 0, (0.6,)), S("clayton", 0, (3.0,)), S("clayton", 270, (2.0,)),
    S("gumbel", 0, (2.0,)), S("frank", 0, (-5.0,)), S("joe", 180, (3.0,)),
])
def test_fit_pair_recovers_family(spec):
    data = pc.sample(spec, 1500, seed=21)
    res = pc.fit_pair(data)
    assert res.spec.family is spec.family
    assert res.spec.rotation == spec.rotation
    assert res.spec.params[0] == pytest.approx(spec.params[0], rel=0.15)
    assert res.aic == pytest.approx(-2 * res.loglik + 2 * res.spec.n_params)


def test_fit_pair_student():
    spec = S("student", 0, (0.5, 4.0))
    res = pc.fit_pair(pc.sample(spec, 2000, seed=4), families=["student", "gaussian"])
    assert res.spec.family is pc.Family.STUDENT
    assert res.spec.params[0] == pytest.approx(0.5, abs=0.06)
    assert 2.5 < res.spec.params[1] < 8.0


def test_independence_screen():
    rng = np.random.default_rng(1)
    data = rng.random((500, 2))
    res = pc.fit_pair(data)
    assert res.spec.family is pc.Family.INDEPENDENCE
    assert res.loglik == 0.0 and res.aic == 0.0


def test_independence_threshold_value():
    n = 500
    assert pc.independence_threshold(n) == pytest.approx(1.96 * np.sqrt(2 * (2 * n + 5) / (9 * n * (n - 1))))


def test_fit_pair_input_errors():
    with pytest.raises(FitError):
        pc.fit_pair(np.full((20, 2), 0.5))
    with pytest.raises(FitError):
        pc.fit_pair(np.array([[0.0, 0.5]] * 20))
    with pytest.raises(FitError):
        pc.fit_pair(np.random.default_rng(0).random((5, 2)))


def test_fit_pair_family_restriction():
    data = pc.sample(S("clayton", 0, (3.0,)), 500, seed=2)
    res = pc.fit_pair(data, families=["gaussian"])
    assert res.spec.family is pc.Family.GAUSSIAN


@settings(max_examples=40, deadline=None)
@given(st.floats(20.0, 300.0), st.sampled_from([1.0, -1.0]), unit, unit)
def test_frank_extreme_parameters_stable(th, sign, w, b):
    spec = S("frank", 0, (sign * th,))
    assert np.isfinite(pc.logpdf(spec, w, b))
    assert pc.hfunc(spec, "1|2", pc.hinv(spec, "1|2", w, b), b) == pytest.approx(w, abs=1e-12)
