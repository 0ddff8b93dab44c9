import numpy as np
import pytest

from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.errors import DomainError
from src.estimators.shifted import (
    ShiftedEstimatorDescriptor,
    ShiftedVariant,
    approximation_distance,
    evaluate_shifted,
    gaussian_approximation,
)
from src.estimators.standard import evaluate_standard_kde
from src.estimators.weight_function import DensityEstimate
from src.kernels.moments import GAUSSIAN_KERNEL
from src.oracle.quadrature import integrate_positive
from src.reference.lognormal import LogNormalRef, ln_sample


@pytest.fixture(scope="module")
def samples():
    return ln_sample(LogNormalRef(1.0, 1.0), 40, seed=5)


def integrate_line(fn, centre, scale, points):
    right = integrate_positive(lambda t: fn(centre + t), scale=scale,
                               breakpoints=points[points > centre] - centre)
    left = integrate_positive(lambda t: fn(centre - t), scale=scale,
                              breakpoints=centre - points[points < centre])
    return right.value + left.value


class TestDegenerateShift:

    def test_balloon_matches_standard(self, samples):
        xs = np.linspace(0.1, 15.0, 31)
        descriptor = ShiftedEstimatorDescriptor.fixed(GAUSSIAN_KERNEL, 0.7)
        np.testing.assert_allclose(evaluate_shifted(descriptor, samples, xs),
                                   evaluate_standard_kde(samples, GAUSSIAN_KERNEL, 0.7, xs), rtol=1e-14)

    def test_sample_smoothing_matches_standard(self, samples):
        xs = np.linspace(0.1, 15.0, 31)
        descriptor = ShiftedEstimatorDescriptor.fixed(GAUSSIAN_KERNEL, 0.7, ShiftedVariant.SAMPLE_SMOOTHING)
        np.testing.assert_allclose(evaluate_shifted(descriptor, samples, xs),
                                   evaluate_standard_kde(samples, GAUSSIAN_KERNEL, 0.7, xs), rtol=1e-13)

    def test_order_comes_from_kernel(self):
        assert ShiftedEstimatorDescriptor.fixed(GAUSSIAN_KERNEL, 1.0).order == 2


class TestDescriptorValidation:

    def test_non_positive_fixed_bandwidth(self):
        with pytest.raises(DomainError):
            ShiftedEstimatorDescriptor.fixed(GAUSSIAN_KERNEL, 0.0)

    def test_bandwidth_function_must_stay_positive(self):
        descriptor = ShiftedEstimatorDescriptor(ShiftedVariant.BALLOON, GAUSSIAN_KERNEL,
                                                lambda t: t - 1.0, np.zeros_like)
        with pytest.raises(DomainError):
            evaluate_shifted(descriptor, [1.0, 2.0], np.array([0.5, 2.0]))

    def test_shift_cap(self):
        descriptor = ShiftedEstimatorDescriptor(ShiftedVariant.BALLOON, GAUSSIAN_KERNEL,
                                                lambda t: np.ones_like(t), lambda t: np.full_like(t, 10.0),
                                                delta_cap=5.0)
        with pytest.raises(DomainError, match="cap"):
            evaluate_shifted(descriptor, [1.0], 1.0)


def test_balloon_offset_moves_the_bump():
    # centre X_i - h^2 delta: one sample at 0 with h = 1 and delta = 0.5 peaks at x = -0.5
    descriptor = ShiftedEstimatorDescriptor(ShiftedVariant.BALLOON, GAUSSIAN_KERNEL,
                                            lambda t: np.ones_like(t), lambda t: np.full_like(t, 0.5))
    assert evaluate_shifted(descriptor, [0.0], -0.5) == pytest.approx(GAUSSIAN_KERNEL(0.0), rel=1e-14)


def test_sample_smoothing_integrates_to_one(samples):
    descriptor = gaussian_approximation(KernelSpec(KernelFamily.GAMMA, KernelRole.PROPER, 0.3))
    assert descriptor.variant is ShiftedVariant.SAMPLE_SMOOTHING
    centre = float(np.median(samples.values))
    total = integrate_line(lambda x: evaluate_shifted(descriptor, samples, x), centre, centre,
                           samples.values)
    assert total == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("role", [KernelRole.IMPROPER, KernelRole.PROPER])
def test_gaussian_approximation_tracks_small_sigma_estimate(role):
    samples = ln_sample(LogNormalRef(1.0, 1.0), 2000, seed=9)
    spec = KernelSpec(KernelFamily.GAMMA, role, 0.05)
    xs = np.array([2.0, 3.0, 4.0])
    exact = DensityEstimate(spec, samples).evaluate_grid(xs)
    approximation = evaluate_shifted(gaussian_approximation(spec), samples, xs)
    np.testing.assert_allclose(approximation, exact, rtol=0.05)


class TestApproximationDistance:

    XS = np.linspace(0.5, 5.0, 4501)

    def distances(self, samples):
        return [approximation_distance(KernelSpec(KernelFamily.GAMMA, KernelRole.IMPROPER, sigma), samples, self.XS)
                for sigma in (0.2, 0.1, 0.05)]

    def test_shrinks_as_sigma_halves(self):
        coarse, middle, fine = self.distances([1.0, 2.0, 3.0])
        assert middle < 0.8 * coarse
        assert fine < 0.8 * middle

    def test_single_kernel_tracks_skewness(self):
        # one gamma kernel differs from its Gaussian by about its skewness 2 sigma / sqrt(x)
        for sigma, distance in zip((0.2, 0.1, 0.05), self.distances([2.0])):
            assert 0.01 * sigma < distance < 2.0 * sigma

    def test_vanishes_away_from_the_samples(self):
        assert approximation_distance(KernelSpec(KernelFamily.GAMMA, KernelRole.IMPROPER, 0.05),
                                      [50.0], self.XS) < 1e-12

    def test_proper_kernel_rejected(self):
        with pytest.raises(DomainError):
            approximation_distance(KernelSpec(KernelFamily.GAMMA, KernelRole.PROPER, 0.1), [1.0], self.XS)
