import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensengap.distributions import (
    Discrete,
    Empirical,
    Gaussian,
    Laplace,
    MeanOfN,
    Uniform,
    distribution_from_dict,
    mean_of_n,
    symmetric_outlier,
    three_point,
    two_point,
)
from jensengap.errors import InvalidParameterError

ORDERS = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0)


def test_two_point_moments_are_flat():
    dist = two_point(0.3, 0.7)
    assert dist.mean() == pytest.approx(0.3)
    for p in ORDERS:
        # |X - mu| is identically sigma, so every order agrees
        assert dist.abs_central_moment(p).sigma_p == pytest.approx(0.7, rel=1e-14)


def test_three_point_moment_closed_form():
    a, p = 2.5, 0.2
    dist = three_point(0.0, a, p)
    for beta in ORDERS:
        want = p ** (1.0 / beta) * a
        got = dist.abs_central_moment(beta).sigma_p
        assert got == pytest.approx(want, rel=1e-13)


def test_three_point_collapses_at_full_mass():
    assert three_point(0.0, 1.5, 1.0).points == two_point(0.0, 1.5).points


def test_symmetric_outlier_moment_closed_form():
    j, m = 8.0, 1.5
    dist = symmetric_outlier(j, m)
    for r in ORDERS:
        assert dist.abs_central_moment(r).sigma_p == pytest.approx(
            j ** (1.0 - m / r), rel=1e-13)


def test_symmetric_outlier_base_case():
    # at j = 1 the outlier weight saturates and the family is two points
    dist = symmetric_outlier(1.0, 2.0)
    assert dist.points == two_point(0.0, 1.0).points


def test_discrete_exact_sums():
    dist = Discrete(((-1.0, 0.25), (0.5, 0.5), (2.0, 0.25)))
    mu = -0.25 + 0.25 + 0.5
    assert dist.mean() == pytest.approx(mu)
    mv = dist.abs_central_moment(2.0)
    want = 0.25 * (1.0 + mu) ** 2 + 0.5 * (0.5 - mu) ** 2 + 0.25 * (2.0 - mu) ** 2
    assert mv.sigma_p_pow == pytest.approx(want, rel=1e-15)
    assert mv.abs_error_estimate == 0.0
    assert mv.method == "exact_sum"


def test_zeroth_order_convention():
    # |t|^0 == 1 even at t == 0, so sigma_0 is always 1
    for dist in (two_point(0.0, 1.0), Gaussian(0.0, 1.0), Uniform(-1.0, 1.0),
                 Discrete(((0.0, 1.0),))):
        mv = dist.abs_central_moment(0.0)
        assert mv.sigma_p == 1.0 and mv.sigma_p_pow == 1.0
        assert mv.abs_error_estimate == 0.0


def test_gaussian_moment_closed_form():
    sigma = 0.8
    dist = Gaussian(1.0, sigma)
    for p in ORDERS:
        want = sigma ** p * 2.0 ** (p / 2.0) * math.gamma((p + 1) / 2.0) / math.sqrt(math.pi)
        assert dist.abs_central_moment(p).sigma_p_pow == pytest.approx(want, rel=1e-12)
    assert dist.abs_central_moment(2.0).sigma_p == pytest.approx(sigma, rel=1e-12)


def test_laplace_moment_closed_form():
    b = 0.6
    dist = Laplace(-2.0, b)
    for p in ORDERS:
        assert dist.abs_central_moment(p).sigma_p_pow == pytest.approx(
            b ** p * math.gamma(p + 1.0), rel=1e-12)


def test_uniform_moment_closed_form():
    dist = Uniform(1.0, 4.0)
    half = 1.5
    for p in ORDERS:
        assert dist.abs_central_moment(p).sigma_p_pow == pytest.approx(
            half ** p / (p + 1.0), rel=1e-12)


def test_quadrature_route_agrees_with_closed_form():
    for dist in (Gaussian(0.5, 1.2), Laplace(0.0, 0.9), Uniform(-2.0, 1.0)):
        for p in (1.0, 2.0, 3.5):
            exact = dist.abs_central_moment(p)
            quad = dist.abs_central_moment(p, method="quadrature")
            assert quad.sigma_p_pow == pytest.approx(exact.sigma_p_pow, rel=1e-8)
            assert abs(quad.sigma_p_pow - exact.sigma_p_pow) <= max(
                quad.abs_error_estimate, 1e-12)


def test_monte_carlo_route_within_error_bars():
    dist = Gaussian(0.0, 1.0)
    exact = dist.abs_central_moment(2.0).sigma_p_pow
    mc = dist.abs_central_moment(2.0, method="monte_carlo", seed=11, samples=200_000)
    assert mc.method == "monte_carlo"
    assert mc.abs_error_estimate > 0
    # 95% interval, checked at 2.5x for slack
    assert abs(mc.sigma_p_pow - exact) <= 2.5 * mc.abs_error_estimate


def test_sampling_is_seed_deterministic():
    dist = Laplace(0.0, 1.0)
    a = dist.sample(64, seed=5)
    b = dist.sample(64, seed=5)
    c = dist.sample(64, seed=6)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_mean_of_n_variance_scaling():
    base = Uniform(-1.0, 1.0)
    avg = mean_of_n(base, 16)
    assert avg.mean() == pytest.approx(0.0)
    mv = avg.abs_central_moment(2.0, seed=3)
    want = base.abs_central_moment(2.0).sigma_p_pow / 16.0
    assert abs(mv.sigma_p_pow - want) <= 4.0 * mv.abs_error_estimate


def test_empirical_exact():
    samples = (0.0, 1.0, 1.0, 4.0)
    dist = Empirical(samples)
    assert dist.mean() == pytest.approx(1.5)
    assert dist.abs_central_moment(1.0).sigma_p == pytest.approx(
        (1.5 + 0.5 + 0.5 + 2.5) / 4.0)


def test_expectation_of_function_exact_sum():
    dist = two_point(0.0, 0.5)
    est = dist.expect(lambda x: np.cos(x))
    assert est.value == pytest.approx(math.cos(0.5))
    assert est.abs_error == 0.0


def test_constructor_rejections():
    with pytest.raises(InvalidParameterError):
        two_point(0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        three_point(0.0, 1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        three_point(0.0, 1.0, 1.5)
    with pytest.raises(InvalidParameterError):
        symmetric_outlier(0.5, 1.0)
    with pytest.raises(InvalidParameterError):
        symmetric_outlier(2.0, -1.0)
    with pytest.raises(InvalidParameterError):
        Discrete(((0.0, 0.5), (1.0, 0.2)))  # mass does not sum to one
    with pytest.raises(InvalidParameterError):
        Discrete(((0.0, 0.5), (0.0, 0.5)))  # duplicate atom
    with pytest.raises(InvalidParameterError):
        Uniform(2.0, 2.0)
    with pytest.raises(InvalidParameterError):
        Gaussian(0.0, -1.0)


def test_from_dict_round_trip():
    cases = (
        two_point(0.25, 1.5),
        Gaussian(1.0, 2.0),
        Laplace(-1.0, 0.5),
        Uniform(0.0, 3.0),
        Empirical((1.0, 2.0, 4.0)),
        mean_of_n(Uniform(-1.0, 1.0), 8),
    )
    for dist in cases:
        again = distribution_from_dict(dist.to_dict())
        assert again.variant == dist.variant
        assert again.mean() == pytest.approx(dist.mean())
        assert again.abs_central_moment(2.0, seed=1).sigma_p_pow == pytest.approx(
            dist.abs_central_moment(2.0, seed=1).sigma_p_pow)


def test_from_dict_named_shortcuts():
    d = distribution_from_dict({"variant": "two_point", "mu": 1.0, "sigma": 0.5})
    assert d.points == two_point(1.0, 0.5).points
    d = distribution_from_dict({"variant": "three_point", "mu": 0.0, "a": 2.0, "p": 0.1})
    assert d.points == three_point(0.0, 2.0, 0.1).points
    d = distribution_from_dict({"variant": "symmetric_outlier", "j": 4.0, "m": 1.0})
    assert d.points == symmetric_outlier(4.0, 1.0).points
    with pytest.raises(InvalidParameterError):
        distribution_from_dict({"variant": "two_point", "mu": 0.0})
    with pytest.raises(InvalidParameterError):
        distribution_from_dict({"variant": "unheard_of"})
    with pytest.raises(InvalidParameterError):
        distribution_from_dict(["not", "a", "dict"])


@st.composite
def discrete_dists(draw):
    count = draw(st.integers(min_value=2, max_value=6))
    xs = draw(st.lists(
        st.floats(min_value=-50.0, max_value=50.0,
                  allow_nan=False, allow_infinity=False),
        min_size=count, max_size=count, unique=True))
    ws = draw(st.lists(st.floats(min_value=0.05, max_value=1.0),
                       min_size=count, max_size=count))
    total = sum(ws)
    return Discrete(tuple((x, w / total) for x, w in sorted(zip(xs, ws))))


@settings(max_examples=120, deadline=None)
@given(dist=discrete_dists(),
       r=st.floats(min_value=0.1, max_value=6.0),
       s=st.floats(min_value=0.1, max_value=6.0))
def test_moment_order_monotonicity(dist, r, s):
    """sigma_r <= sigma_s whenever r <= s, with only rounding slack."""
    lo, hi = sorted((r, s))
    sig_lo = dist.abs_central_moment(lo).sigma_p
    sig_hi = dist.abs_central_moment(hi).sigma_p
    assert sig_hi - sig_lo >= -1e-12 * max(sig_hi, 1.0)
