import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.bandwidth.cross_validation import (
    cv_profile,
    default_sigma_grid,
    gamma_overlap,
    integral_of_square,
    leave_one_out_sum,
    loo_cv_score,
    sigma_ceiling,
)
from src.bandwidth.plugin import plugin_bandwidth
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.sample import SampleSet
from src.errors import DomainError, InsufficientSamples
from src.estimators.weight_function import DensityEstimate
from src.kernels.distributions import pdf_gamma
from src.kernels.weights import weight
from src.oracle.quadrature import integrate_positive
from src.reference.lognormal import LogNormalRef, ln_sample

F = KernelFamily
PROPER_GAMMA = KernelSpec(F.GAMMA, KernelRole.PROPER, 1.0)


def overlap_by_quadrature(xi, xj, sigma, expected):
    s2 = sigma * sigma

    def product(x):
        return pdf_gamma(x, 1.0 + xi / s2, s2) * pdf_gamma(x, 1.0 + xj / s2, s2)

    points = [p for p in (xi, xj, 0.5 * (xi + xj)) if p > 0]
    return integrate_positive(product, abs_tol=1e-11 * expected, rel_tol=1e-10, scale=max(xi, xj, s2),
                              breakpoints=points).value


class TestGammaOverlap:

    def test_unit_sigma(self):
        assert gamma_overlap(0.0, 0.0, 1.0) == pytest.approx(0.5, rel=1e-14)

    def test_carries_inverse_sigma_squared(self):
        assert gamma_overlap(0.0, 0.0, 0.5) == pytest.approx(2.0, rel=1e-14)

    def test_matches_quadrature_of_squared_density(self):
        expected = gamma_overlap(1.0, 1.0, 0.5)
        assert overlap_by_quadrature(1.0, 1.0, 0.5, expected) == pytest.approx(expected, rel=1e-9)

    @given(xi=st.floats(min_value=0.0, max_value=10.0), xj=st.floats(min_value=0.0, max_value=10.0),
           sigma=st.floats(min_value=0.1, max_value=1.0))
    def test_symmetric(self, xi, xj, sigma):
        assert gamma_overlap(xi, xj, sigma) == pytest.approx(gamma_overlap(xj, xi, sigma), rel=1e-14)

    @given(xi=st.floats(min_value=0.1, max_value=5.0), log_ratio=st.floats(min_value=-0.3, max_value=0.3),
           sigma=st.floats(min_value=0.2, max_value=1.0))
    def test_matches_quadrature(self, xi, log_ratio, sigma):
        xj = xi * math.exp(log_ratio)
        expected = gamma_overlap(xi, xj, sigma)
        assert overlap_by_quadrature(xi, xj, sigma, expected) == pytest.approx(expected, rel=1e-8)

    def test_vectorised(self):
        values = gamma_overlap(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 1.0)
        assert values.shape == (2,)
        assert values[0] == pytest.approx(0.5)

    def test_negative_location(self):
        with pytest.raises(DomainError):
            gamma_overlap(-1.0, 1.0, 0.5)


class TestScore:

    def test_two_equal_samples(self):
        sigma = 0.4
        samples = SampleSet.of([1.0, 1.0])
        expected = gamma_overlap(1.0, 1.0, sigma) - 2.0 * weight(PROPER_GAMMA.with_sigma(sigma), 1.0, 1.0)
        assert loo_cv_score(PROPER_GAMMA, samples, sigma) == pytest.approx(expected, rel=1e-12)

    def test_closed_form_square_matches_quadrature(self):
        samples = ln_sample(LogNormalRef(0.0, 0.7), 20, seed=3)
        spec = PROPER_GAMMA.with_sigma(0.3)
        closed = integral_of_square(spec, samples)
        numeric = DensityEstimate(spec, samples).integrate_square().value
        assert closed == pytest.approx(numeric, rel=1e-7)

    @pytest.mark.parametrize("spec", [PROPER_GAMMA, KernelSpec(F.LOG_NORMAL, KernelRole.IMPROPER, 1.0)],
                             ids=lambda s: s.label)
    def test_permutation_invariant(self, spec):
        samples = ln_sample(LogNormalRef(0.5, 0.6), 15, seed=4)
        shuffled = SampleSet(np.random.default_rng(42).permutation(samples.values))
        assert loo_cv_score(spec, shuffled, 0.35) == pytest.approx(loo_cv_score(spec, samples, 0.35), rel=1e-10)

    def test_worker_count_does_not_change_sums(self, lognormal_samples):
        spec = PROPER_GAMMA.with_sigma(0.3)
        assert leave_one_out_sum(spec, lognormal_samples, workers=1) == leave_one_out_sum(spec, lognormal_samples,
                                                                                          workers=3)
        assert integral_of_square(spec, lognormal_samples, workers=1) == integral_of_square(spec, lognormal_samples,
                                                                                            workers=3)

    def test_single_sample(self):
        with pytest.raises(InsufficientSamples, match="need at least two samples"):
            loo_cv_score(PROPER_GAMMA, SampleSet.of([1.0]), 0.3)


class TestProfile:

    def test_single_grid_point(self, lognormal_samples):
        profile = cv_profile(PROPER_GAMMA, lognormal_samples, [0.3])
        assert profile.cv_argmin == 0.3

    def test_interior_minimum(self, lognormal_samples):
        grid = np.geomspace(0.05, 1.5, 40)
        profile = cv_profile(PROPER_GAMMA, lognormal_samples, grid, workers=2)
        assert profile.interior_minimum
        assert profile.cv_argmin == grid[int(np.argmin(profile.cv_scores))]
        step = math.log(grid[1] / grid[0])
        assert abs(math.log(profile.asymptotic_argmin / profile.plugin_sigma)) <= step

    def test_plugin_attached(self, lognormal_samples):
        profile = cv_profile(PROPER_GAMMA, lognormal_samples, [0.2, 0.3])
        assert profile.plugin_sigma == plugin_bandwidth(PROPER_GAMMA, lognormal_samples.log_mean,
                                                        lognormal_samples.log_std, lognormal_samples.n)
        assert profile.asymptotic_mise.shape == (2,)

    def test_unsupported_spec_has_no_curve(self, lognormal_samples):
        spec = KernelSpec(F.INVERSE_GAUSSIAN, KernelRole.PROPER, 1.0)
        profile = cv_profile(spec, SampleSet(lognormal_samples.values[:30]), [0.2, 0.4])
        assert profile.asymptotic_mise is None
        assert profile.plugin_sigma is None

    @pytest.mark.parametrize("grid", [[0.3, 0.2], [0.0, 0.2], []])
    def test_invalid_grid(self, lognormal_samples, grid):
        with pytest.raises(DomainError):
            cv_profile(PROPER_GAMMA, lognormal_samples, grid)

    def test_single_sample(self):
        with pytest.raises(InsufficientSamples):
            cv_profile(PROPER_GAMMA, SampleSet.of([1.0]), [0.3])


def test_default_grid_brackets_plugin(lognormal_samples):
    grid = default_sigma_grid(PROPER_GAMMA, lognormal_samples)
    plugin = plugin_bandwidth(PROPER_GAMMA, lognormal_samples.log_mean, lognormal_samples.log_std,
                              lognormal_samples.n)
    assert grid.size == 40
    assert grid[0] == pytest.approx(plugin / 5)
    assert grid[-1] == pytest.approx(plugin * 5)


def test_default_grid_without_plugin():
    grid = default_sigma_grid(KernelSpec(F.INVERSE_GAUSSIAN, KernelRole.PROPER, 1.0), SampleSet.of([1.0, 2.0]))
    assert grid[0] == pytest.approx(0.01)
    assert grid[-1] == pytest.approx(2.0)


class TestImproperReciprocalInverseGaussian:
    """The estimate only exists above sigma^2, so f_hat_{-i}(X_i) needs sigma^2 < min X_i."""

    SPEC = KernelSpec(F.RECIPROCAL_INVERSE_GAUSSIAN, KernelRole.IMPROPER, 1.0)

    @pytest.fixture(scope="class")
    def samples(self):
        return ln_sample(LogNormalRef(1.0, 1.0), 200, seed=7)

    def test_ceiling(self):
        assert sigma_ceiling(self.SPEC, SampleSet.of([0.25, 1.0, 3.0])) == pytest.approx(0.5)
        assert sigma_ceiling(PROPER_GAMMA, SampleSet.of([0.25, 1.0])) == math.inf
        proper = KernelSpec(F.RECIPROCAL_INVERSE_GAUSSIAN, KernelRole.PROPER, 1.0)
        assert sigma_ceiling(proper, SampleSet.of([0.25, 1.0])) == math.inf

    def test_default_grid_is_capped(self, samples):
        smallest = float(np.min(samples.values))
        plugin = plugin_bandwidth(self.SPEC, samples.log_mean, samples.log_std, samples.n)
        assert (5 * plugin) ** 2 > smallest
        grid = default_sigma_grid(self.SPEC, samples, 6)
        assert grid.size == 6
        assert grid[-1] == pytest.approx(0.99 * math.sqrt(smallest))
        assert grid[-1] / grid[0] >= 25 * (1 - 1e-12)

    def test_profile_on_default_grid(self, samples):
        grid = default_sigma_grid(self.SPEC, samples, 6)
        profile = cv_profile(self.SPEC, samples, grid, workers=2)
        assert np.all(np.isfinite(profile.cv_scores))
        assert profile.cv_argmin in grid
        assert profile.asymptotic_mise is not None

    def test_grid_points_above_ceiling_are_unscored(self):
        samples = SampleSet.of([0.25, 0.5, 1.0, 2.0, 4.0])
        profile = cv_profile(self.SPEC, samples, [0.1, 0.2, 0.6])
        assert np.all(np.isfinite(profile.cv_scores[:2]))
        assert math.isnan(profile.cv_scores[2])
        assert profile.cv_argmin in (0.1, 0.2)

    def test_no_grid_point_below_ceiling(self):
        samples = SampleSet.of([0.25, 0.5, 1.0])
        with pytest.raises(DomainError, match="every grid sigma"):
            cv_profile(self.SPEC, samples, [0.5, 0.6])

    def test_single_score_above_ceiling_raises(self):
        with pytest.raises(DomainError, match="sigma\\^2"):
            loo_cv_score(self.SPEC, SampleSet.of([0.25, 0.5, 1.0]), 0.6)
