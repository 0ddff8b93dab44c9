"""
Shifted balloon and sample-smoothing estimators with a symmetric kernel and
user-supplied bandwidth h and shift delta.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from numpy.typing import ArrayLike

from src.config import DEFAULTS
from src.dtos.kernel import KernelMoments, KernelRole, KernelSpec, SymmetricKernel
from src.dtos.sample import SampleSet
from src.errors import DomainError
from src.estimators.standard import sample_values
from src.estimators.weight_function import DensityEstimate
from src.kernels.moments import GAUSSIAN_KERNEL, kernel_moments
from src.kernels.weights import effective_bandwidth, shift_term

PointFn = Callable[[np.ndarray], np.ndarray]


class ShiftedVariant(Enum):
    BALLOON = "balloon"
    SAMPLE_SMOOTHING = "sample-smoothing"


@lru_cache(maxsize=32)
def _moments_of(kernel: SymmetricKernel) -> KernelMoments:
    return kernel_moments(kernel)


@dataclass(frozen=True)
class ShiftedEstimatorDescriptor:
    """
    A variable-bandwidth estimator centred at X_i - h^p delta (balloon, h and delta
    evaluated at x) or X_i + h^p delta (sample smoothing, evaluated at X_i).

    The order p comes from the kernel's moments.
    """
    variant: ShiftedVariant
    kernel: SymmetricKernel
    bandwidth_fn: PointFn = field(compare=False)
    shift_fn: PointFn = field(compare=False)
    moments: Optional[KernelMoments] = None
    delta_cap: float = DEFAULTS.delta_cap

    def __post_init__(self):
        if self.moments is None:
            object.__setattr__(self, "moments", _moments_of(self.kernel))

    @property
    def order(self) -> int:
        return self.moments.order

    @classmethod
    def fixed(cls, kernel: SymmetricKernel, h: float,
              variant: ShiftedVariant = ShiftedVariant.BALLOON) -> ShiftedEstimatorDescriptor:
        """Constant bandwidth and no shift; reduces to the standard estimator."""
        if not (h > 0):
            raise DomainError(f"bandwidth must be positive, got {h}")
        return cls(variant, kernel, lambda t: np.full(np.shape(t), float(h)), np.zeros_like)

    def bandwidth_and_offset(self, at: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        """
        Return h and the centre offset h^p delta at ``at``.

        Raises:
            DomainError: If h is not positive and finite, or |delta| exceeds the cap
        """
        at = np.asarray(at, dtype=float)
        h = np.broadcast_to(np.asarray(self.bandwidth_fn(at), dtype=float), at.shape)
        delta = np.broadcast_to(np.asarray(self.shift_fn(at), dtype=float), at.shape)
        if not np.all(np.isfinite(h) & (h > 0)):
            raise DomainError("bandwidth function must be positive and finite at every point")
        if not np.all(np.abs(delta) <= self.delta_cap):
            raise DomainError(f"shift exceeds the boundedness cap {self.delta_cap:g}")
        return h, h ** self.order * delta


def evaluate_shifted(descriptor: ShiftedEstimatorDescriptor, samples: Union[SampleSet, ArrayLike],
                     x: ArrayLike):
    """
    Evaluate a shifted estimator.

    Balloon: (1/n) sum_i K((X_i - x - h(x)^p delta(x)) / h(x)) / h(x).
    Sample smoothing: (1/n) sum_i K((X_i - x + h(X_i)^p delta(X_i)) / h(X_i)) / h(X_i).

    Args:
        descriptor (ShiftedEstimatorDescriptor): Estimator definition
        samples (Union[SampleSet, ArrayLike]): Observations
        x (ArrayLike): Evaluation point(s)

    Returns:
        float or np.ndarray: Estimates
    """
    values = sample_values(samples)
    x = np.asarray(x, dtype=float)
    if descriptor.variant is ShiftedVariant.BALLOON:
        h, offset = descriptor.bandwidth_and_offset(x)
        h, offset = h[..., None], offset[..., None]
        z = (values - x[..., None] - offset) / h
        out = np.mean(descriptor.kernel(z), axis=-1) / h[..., 0]
    else:
        h, offset = descriptor.bandwidth_and_offset(values)
        z = (values - x[..., None] + offset) / h
        out = np.mean(descriptor.kernel(z) / h, axis=-1)
    return float(out) if out.ndim == 0 else out


def gaussian_approximation(spec: KernelSpec) -> ShiftedEstimatorDescriptor:
    """
    Small-sigma limit of an asymmetric-kernel estimator: a Gaussian kernel with the
    same mean and standard deviation as each weight.

    Improper kernels give a balloon estimator, proper kernels a sample-smoothing one.
    """
    def bandwidth(t):
        return effective_bandwidth(spec, t)

    def delta(t):
        return np.asarray(shift_term(spec, t)) / np.asarray(effective_bandwidth(spec, t)) ** 2

    variant = ShiftedVariant.BALLOON if spec.role is KernelRole.IMPROPER else ShiftedVariant.SAMPLE_SMOOTHING
    return ShiftedEstimatorDescriptor(variant, GAUSSIAN_KERNEL, bandwidth, delta)


def approximation_distance(spec: KernelSpec, samples: Union[SampleSet, ArrayLike], x: ArrayLike) -> float:
    """
    sup over ``x`` of n h(x) |f_hat(x) - f_gauss(x)|, where f_gauss comes from
    ``gaussian_approximation(spec)`` and h is the effective bandwidth.

    Each kernel differs from its Gaussian by about its skewness times its peak height
    1 / h, and that peak is 1 / (n h) in the estimate. The scaled distance therefore
    shrinks like sigma for fixed samples, while the raw distance does not.

    Raises:
        DomainError: For proper kernels, whose approximation varies h with the sample
    """
    if spec.role is not KernelRole.IMPROPER:
        raise DomainError("the approximation distance is defined for improper kernels")
    samples = samples if isinstance(samples, SampleSet) else SampleSet(np.asarray(samples, dtype=float))
    x = np.asarray(x, dtype=float).ravel()
    exact = DensityEstimate(spec, samples).evaluate_grid(x)
    approximation = evaluate_shifted(gaussian_approximation(spec), samples, x)
    scaled = samples.n * np.asarray(effective_bandwidth(spec, x)) * np.abs(exact - approximation)
    return float(np.max(scaled))
