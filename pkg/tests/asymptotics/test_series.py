import math

import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermeval
from scipy.stats import norm

from src.asymptotics.derivatives import ReferenceDensity
from src.asymptotics.lemmas import lemma_balloon_integral_oracle, lemma_smoothing_integral_oracle
from src.asymptotics.series import (
    balloon_coefficient_A,
    shifted_bias,
    shifted_report,
    shifted_variance,
    smoothing_coefficient_B,
)
from src.asymptotics.table import table2_bias
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.errors import DomainError
from src.estimators.shifted import ShiftedVariant, gaussian_approximation
from src.kernels.moments import GAUSSIAN_KERNEL
from src.reference.lognormal import LogNormalRef, as_reference_density

KAPPA = 1.0 / (2.0 * math.sqrt(math.pi))


def standard_normal_density() -> ReferenceDensity:
    def analytic(x, order):
        return (-1) ** order * hermeval(x, [0.0] * order + [1.0]) * norm.pdf(x)

    return ReferenceDensity(pdf=norm.pdf, analytic=analytic, domain=(-math.inf, math.inf))


def constant(value):
    return lambda t: value


@pytest.fixture(scope="module")
def f():
    return as_reference_density(LogNormalRef(1.0, 1.0))


class TestDegenerateShift:

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_balloon_single_term(self, f, k):
        value = balloon_coefficient_A(k, 1.5, f, constant(0.1), constant(0.0), 2)
        assert value == pytest.approx(0.1 ** k * f.derivative(1.5, k) / math.factorial(k), rel=1e-12)

    @pytest.mark.parametrize("k", [0, 2])
    def test_smoothing_agrees_with_balloon(self, f, k):
        a = balloon_coefficient_A(k, 1.5, f, constant(0.1), constant(0.0), 2)
        b = smoothing_coefficient_B(k, 1.5, f, constant(0.1), constant(0.0), 2)
        assert b == pytest.approx(a, rel=1e-7)

    @pytest.mark.parametrize("variant", list(ShiftedVariant))
    def test_classical_bias(self, f, variant):
        bias = shifted_bias(variant, 2.0, f, constant(0.2), constant(0.0), 2)
        assert bias == pytest.approx(0.02 * f.derivative(2.0, 2), rel=1e-7)


def test_normal_density_with_unit_shift():
    value = balloon_coefficient_A(0, 0.0, standard_normal_density(), constant(0.1), constant(1.0), 2, J=1)
    assert value == pytest.approx(0.3989423, rel=1e-6)


def test_truncation_below_k():
    with pytest.raises(DomainError):
        balloon_coefficient_A(3, 1.0, standard_normal_density(), constant(0.1), constant(0.0), 2, J=2)


def test_gamma_balloon_bias_matches_table(f):
    sigma, x = 0.1, 2.0
    bias = shifted_bias(ShiftedVariant.BALLOON, x, f, lambda t: sigma * math.sqrt(t + sigma ** 2),
                        lambda t: 1.0 / (t + sigma ** 2), 2)
    table = table2_bias(KernelSpec(KernelFamily.GAMMA, KernelRole.IMPROPER, sigma), x, f)
    assert bias == pytest.approx(table, abs=sigma ** 4 * abs(f.derivative(x, 2)))


def test_sample_smoothing_bias_matches_proper_gamma(f):
    sigma, x = 0.05, 2.0
    bias = shifted_bias(ShiftedVariant.SAMPLE_SMOOTHING, x, f, lambda t: sigma * math.sqrt(t),
                        lambda t: 1.0 / t, 2)
    table = table2_bias(KernelSpec(KernelFamily.GAMMA, KernelRole.PROPER, sigma), x, f)
    assert bias == pytest.approx(table, rel=1e-6)


class TestVariance:

    def test_improper_gamma(self, f):
        sigma, x, n = 0.2, 1.5, 300
        value = shifted_variance(x, f, lambda t: sigma * math.sqrt(t + sigma ** 2), KAPPA, n)
        assert value == pytest.approx(f(x) / (2 * n * sigma * math.sqrt(math.pi * (x + sigma ** 2))), rel=1e-12)

    def test_inverse_gaussian(self, f):
        sigma, x, n = 0.2, 1.5, 300
        value = shifted_variance(x, f, lambda t: sigma * t ** 1.5, KAPPA, n)
        assert value == pytest.approx(f(x) / (2 * math.sqrt(math.pi) * sigma * x ** 1.5 * n), rel=1e-12)

    def test_doubling_n_halves(self, f):
        h = constant(0.3)
        assert shifted_variance(1.0, f, h, KAPPA, 200) == pytest.approx(shifted_variance(1.0, f, h, KAPPA, 100) / 2,
                                                                        rel=1e-15)

    def test_requires_positive_n(self, f):
        with pytest.raises(DomainError):
            shifted_variance(1.0, f, constant(0.3), KAPPA, 0)


def test_report_of_gaussian_approximation(f):
    spec = KernelSpec(KernelFamily.GAMMA, KernelRole.IMPROPER, 0.1)
    report = shifted_report(gaussian_approximation(spec), 1.0, f, 500)
    assert report.leading_order == {"bias": 2, "variance": -1}
    assert report.mse == report.bias ** 2 + report.variance
    assert report.bias == pytest.approx(table2_bias(spec, 1.0, f), rel=0.05)


def test_truncated_series_converge_to_quadrature(f):
    """A_0 + A_2 and B_0 + B_2 approach the direct integrals faster than sigma^2."""
    x = 1.0

    def delta_fn(t):
        return 1.0 / t

    balloon, smoothing = [], []
    for sigma in (0.2, 0.1, 0.05):
        def h_fn(t, sigma=sigma):
            return sigma * math.sqrt(t)

        oracle = lemma_balloon_integral_oracle(GAUSSIAN_KERNEL, f, h_fn, delta_fn, 2, x)
        series = sum(balloon_coefficient_A(k, x, f, h_fn, delta_fn, 2) for k in (0, 2))
        balloon.append(abs(oracle - series) / sigma ** 2)
        oracle = lemma_smoothing_integral_oracle(GAUSSIAN_KERNEL, f, h_fn, delta_fn, 2, x)
        series = sum(smoothing_coefficient_B(k, x, f, h_fn, delta_fn, 2) for k in (0, 2))
        smoothing.append(abs(oracle - series) / sigma ** 2)

    assert np.all(np.diff(balloon) < 0)
    assert np.all(np.diff(smoothing) < 0)
