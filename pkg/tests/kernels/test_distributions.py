import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import DomainError
from src.kernels import distributions as dist
from src.oracle.quadrature import integrate_positive

positive = st.floats(min_value=0.05, max_value=20.0)


class TestClosedForms:

    def test_gamma_exponential_case(self):
        assert dist.pdf_gamma(1.0, 1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_gamma_shape_two(self):
        assert dist.pdf_gamma(0.5, 2.0, 0.25) == pytest.approx(8.0 * math.exp(-2.0), rel=1e-13)

    def test_lognormal_peak(self):
        assert dist.pdf_lognormal(1.0, 0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)

    def test_array_input_broadcasts(self):
        values = dist.pdf_gamma(np.array([0.5, 1.0, 2.0]), 2.0, np.array([[0.5], [1.0]]))
        assert values.shape == (2, 3)

    def test_scalar_input_gives_float(self):
        assert isinstance(dist.pdf_inverse_gaussian(1.0, 1.0, 1.0), float)


class TestNormalization:

    def test_gamma(self):
        result = integrate_positive(lambda t: dist.pdf_gamma(t, 3.7, 0.9), scale=3.3)
        assert result.value == pytest.approx(1.0, abs=1e-9)

    def test_inverse_gaussian_mean(self):
        result = integrate_positive(lambda t: t * dist.pdf_inverse_gaussian(t, 2.0, 5.0), scale=2.0, breakpoints=[2.0])
        assert result.value == pytest.approx(2.0, rel=1e-8)

    def test_birnbaum_saunders_variance(self):
        mean, variance = dist.mean_variance("birnbaum-saunders", 0.3, 1.0)
        assert variance == pytest.approx(0.100125, rel=1e-12)
        result = integrate_positive(lambda t: (t - mean) ** 2 * dist.pdf_birnbaum_saunders(t, 0.3, 1.0),
                                    scale=1.0, breakpoints=[1.0])
        assert result.value == pytest.approx(0.100125, rel=1e-7)

    @pytest.mark.parametrize("family, pdf, params", [
        ("gamma", dist.pdf_gamma, (2.5, 0.4)),
        ("lognormal", dist.pdf_lognormal, (0.3, 0.6)),
        ("birnbaum-saunders", dist.pdf_birnbaum_saunders, (0.5, 2.0)),
        ("inverse-gaussian", dist.pdf_inverse_gaussian, (1.5, 4.0)),
        ("reciprocal-inverse-gaussian", dist.pdf_reciprocal_inverse_gaussian, (0.8, 3.0)),
    ])
    def test_moments_match_quadrature(self, family, pdf, params):
        mean, variance = dist.mean_variance(family, *params)
        total = integrate_positive(lambda t: pdf(t, *params), scale=mean, breakpoints=[mean]).value
        first = integrate_positive(lambda t: t * pdf(t, *params), scale=mean, breakpoints=[mean]).value
        second = integrate_positive(lambda t: (t - mean) ** 2 * pdf(t, *params), scale=mean,
                                    breakpoints=[mean]).value
        assert total == pytest.approx(1.0, abs=1e-8)
        assert first == pytest.approx(mean, rel=1e-7)
        assert second == pytest.approx(variance, rel=1e-6)


class TestBoundary:

    def test_gamma_unit_shape_limit(self):
        assert dist.pdf_gamma(0.0, 1.0, 0.25) == pytest.approx(4.0)

    def test_gamma_vanishes_for_shape_above_one(self):
        assert dist.pdf_gamma(0.0, 2.0, 1.0) == 0.0

    @pytest.mark.parametrize("pdf, params", [
        (dist.pdf_lognormal, (0.0, 1.0)),
        (dist.pdf_birnbaum_saunders, (0.5, 1.0)),
        (dist.pdf_inverse_gaussian, (1.0, 1.0)),
        (dist.pdf_reciprocal_inverse_gaussian, (1.0, 1.0)),
    ])
    def test_zero_argument_gives_zero(self, pdf, params):
        assert pdf(0.0, *params) == 0.0

    def test_negative_argument_raises(self):
        with pytest.raises(DomainError):
            dist.pdf_gamma(-0.1, 2.0, 1.0)

    def test_non_positive_parameter_raises(self):
        with pytest.raises(DomainError):
            dist.pdf_inverse_gaussian(1.0, 0.0, 1.0)


@given(t=positive, k=positive, theta=positive)
def test_gamma_log_density_consistent(t, k, theta):
    log_value = dist.log_pdf_gamma(t, k, theta)
    value = dist.pdf_gamma(t, k, theta)
    if value > 0:
        assert math.log(value) == pytest.approx(log_value, rel=1e-12, abs=1e-12)


@given(t=positive, mu=positive, lam=positive)
def test_reciprocal_inverse_gaussian_is_transformed_inverse_gaussian(t, mu, lam):
    # density of 1/T is pdf_T(1/t) / t^2
    expected = dist.pdf_inverse_gaussian(1.0 / t, mu, lam) / t ** 2
    assert dist.pdf_reciprocal_inverse_gaussian(t, mu, lam) == pytest.approx(expected, rel=1e-10, abs=1e-300)
