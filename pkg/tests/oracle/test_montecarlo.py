import math

import numpy as np
import pytest

from src.asymptotics.mise import mise_lognormal_reference
from src.asymptotics.table import table2_bias
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.errors import DomainError
from src.estimators.weight_function import DensityEstimate
from src.oracle.montecarlo import cv_unbiasedness, integrated_squared_error, mc_estimator_summary, replicate
from src.oracle.quadrature import integrate_positive
from src.reference.lognormal import LogNormalRef, as_reference_density, ln_pdf, ln_sample

IMPROPER_GAMMA = KernelSpec(KernelFamily.GAMMA, KernelRole.IMPROPER, 1.0)
PROPER_GAMMA = KernelSpec(KernelFamily.GAMMA, KernelRole.PROPER, 1.0)
REFERENCE = LogNormalRef(1.0, 1.0)
POINTS = [1.0, 2.0, 4.0]


class TestReplicate:

    @pytest.mark.parametrize("workers", [1, 3])
    def test_results_in_replication_order(self, workers):
        assert replicate(lambda r: r * r, 6, seed=0, workers=workers) == [0, 1, 4, 9, 16, 25]

    def test_failure_propagates(self):
        def handler(r):
            if r == 2:
                raise DomainError("bad replication")
            return r

        with pytest.raises(DomainError, match="bad replication"):
            replicate(handler, 4, seed=0)


class TestSummary:

    def test_deterministic_across_worker_counts(self):
        one = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 50, 0.3, POINTS, 8, seed=1, with_mise=False, workers=1)
        three = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 50, 0.3, POINTS, 8, seed=1, with_mise=False,
                                     workers=3)
        np.testing.assert_array_equal(one.estimates, three.estimates)
        assert one.point_bias == three.point_bias
        assert one.mise is None

    def test_replications_share_the_run_seed(self):
        summary = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 40, 0.3, POINTS, 3, seed=5, with_mise=False)
        second = DensityEstimate(IMPROPER_GAMMA.with_sigma(0.3), ln_sample(REFERENCE, 40, 5, stream=(1,)))
        np.testing.assert_allclose(summary.estimates[1], second.evaluate_grid(np.array(POINTS)), rtol=1e-14)

    def test_standard_error_shrinks_with_replications(self):
        small = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 100, 0.3, POINTS, 200, seed=3, with_mise=False)
        large = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 100, 0.3, POINTS, 400, seed=3, with_mise=False)
        ratio = np.mean([large.point_bias[x][1] / small.point_bias[x][1] for x in POINTS])
        assert ratio == pytest.approx(1.0 / math.sqrt(2.0), abs=0.1)

    def test_variance_scales_with_sample_size(self):
        small = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 100, 0.3, POINTS, 400, seed=4, with_mise=False)
        large = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 400, 0.3, POINTS, 400, seed=4, with_mise=False)
        ratio = np.mean([small.point_variance[x][0] / large.point_variance[x][0] for x in POINTS])
        assert ratio == pytest.approx(4.0, rel=0.3)

    @pytest.mark.parametrize("replications", [0, 1])
    def test_needs_two_replications(self, replications):
        with pytest.raises(DomainError):
            mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 50, 0.3, POINTS, replications, seed=1)


def test_integrated_squared_error_matches_direct_quadrature():
    samples = ln_sample(REFERENCE, 60, seed=8)
    estimate = DensityEstimate(PROPER_GAMMA.with_sigma(0.4), samples)
    ise = integrated_squared_error(estimate, REFERENCE)
    direct = integrate_positive(lambda x: (estimate.evaluate(x) - ln_pdf(REFERENCE, x)) ** 2, scale=REFERENCE.mean,
                                breakpoints=np.sort(samples.values)).value
    assert ise > 0
    assert ise == pytest.approx(direct, rel=1e-5)


def test_integrated_squared_error_counts_mass_below_improper_reciprocal_inverse_gaussian_domain():
    samples = ln_sample(REFERENCE, 60, seed=8)
    spec = KernelSpec(KernelFamily.RECIPROCAL_INVERSE_GAUSSIAN, KernelRole.IMPROPER, 0.5)
    estimate = DensityEstimate(spec, samples)

    def squared_error(x):
        value = estimate.evaluate(x) if x > 0.25 else 0.0
        return (value - ln_pdf(REFERENCE, x)) ** 2

    direct = integrate_positive(squared_error, scale=REFERENCE.mean,
                                breakpoints=np.sort(np.append(samples.values, 0.25))).value
    assert integrated_squared_error(estimate, REFERENCE) == pytest.approx(direct, rel=1e-5)


@pytest.mark.slow
def test_pointwise_bias_follows_leading_order():
    sigma = 0.15
    summary = mc_estimator_summary(IMPROPER_GAMMA, REFERENCE, 10_000, sigma, [1.0, 2.0], 500, seed=2024,
                                   with_mise=False, workers=4)
    f = as_reference_density(REFERENCE)
    for x in (1.0, 2.0):
        predicted = table2_bias(IMPROPER_GAMMA.with_sigma(sigma), x, f)
        measured, error = summary.point_bias[x]
        assert abs(measured - predicted) <= 3.0 * error + 0.25 * abs(predicted)


@pytest.mark.slow
def test_simulated_mise_is_near_the_asymptotic_value():
    sigma = 0.3
    summary = mc_estimator_summary(PROPER_GAMMA, REFERENCE, 300, sigma, [1.0], 40, seed=6, workers=4)
    predicted = mise_lognormal_reference(PROPER_GAMMA, REFERENCE.mu, REFERENCE.log_sd, 300, sigma)
    assert summary.mise[0] == pytest.approx(predicted, rel=0.5)


@pytest.mark.slow
def test_cross_validation_is_unbiased_for_the_mise():
    check = cv_unbiasedness(PROPER_GAMMA, LogNormalRef(0.0, 1.0), 50, 0.3, 300, seed=7, workers=4)
    assert check.z_score <= 3.0
