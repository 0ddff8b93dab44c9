"""
General weight-function estimator f(x) = (1/n) sum_i W(X_i, x).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelSpec
from src.dtos.report import QuadratureResult
from src.dtos.sample import SampleSet
from src.errors import DomainError
from src.kernels.weights import lower_limit, weight
from src.oracle.quadrature import integrate_positive, tail_cutoff

# weights evaluated per chunk when filling a grid
_CHUNK = 1 << 21


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    """
    An asymmetric-kernel estimator bound to a sample set.

    Every estimator divides by n, including the improper gamma estimator whose
    usual statement omits the factor.
    """
    spec: KernelSpec
    samples: SampleSet

    def __post_init__(self):
        if not self.spec.family.is_asymmetric:
            raise DomainError("weight-function estimates need an asymmetric kernel family")

    def evaluate(self, x: float) -> float:
        return float(np.mean(weight(self.spec, self.samples.values, float(x))))

    def evaluate_grid(self, xs: ArrayLike) -> np.ndarray:
        """
        Evaluate the estimate on every point of ``xs``.

        Args:
            xs (ArrayLike): Evaluation points

        Returns:
            np.ndarray: Estimates, same shape as ``xs``
        """
        xs = np.asarray(xs, dtype=float)
        flat = xs.ravel()
        out = np.empty(flat.size)
        rows = max(1, _CHUNK // self.samples.n)
        for start in range(0, flat.size, rows):
            block = flat[start:start + rows]
            out[start:start + rows] = np.mean(weight(self.spec, self.samples.values[None, :], block[:, None]), axis=1)
        return out.reshape(xs.shape)

    def __call__(self, x: ArrayLike):
        if np.ndim(x) == 0:
            return self.evaluate(float(x))
        return self.evaluate_grid(x)

    def integrate(self, config: Optional[NumericsConfig] = None) -> QuadratureResult:
        """Integral of the estimate over its evaluation domain."""
        return self._integrate(self.evaluate, None, config or DEFAULTS)

    def integrate_square(self, config: Optional[NumericsConfig] = None) -> QuadratureResult:
        """
        Integral of the squared estimate, truncated where it falls below the configured
        fraction of its peak.
        """
        config = config or DEFAULTS
        lower = lower_limit(self.spec)
        points = feature_points(self.samples)
        peak = float(np.max(self.evaluate_grid(points[points > lower]) ** 2, initial=0.0))

        def square(x: float) -> float:
            return self.evaluate(x) ** 2

        start = max(float(points[-1]) - lower, self.spec.sigma ** 2)
        upper = tail_cutoff(lambda t: square(lower + t), start,
                            config.integral_square_tail, peak=peak or None)
        return self._integrate(square, upper, config)

    def _integrate(self, fn, upper: Optional[float], config: NumericsConfig) -> QuadratureResult:
        lower = lower_limit(self.spec)
        points = feature_points(self.samples) - lower
        inside = points[points > 0]
        scale = float(np.median(inside)) if inside.size else 1.0
        return integrate_positive(lambda t: fn(lower + t), scale=scale, breakpoints=inside,
                                  upper=upper, config=config)

    def merge(self, other: DensityEstimate) -> DensityEstimate:
        """Estimate from the union of both sample sets, i.e. the n-weighted mixture."""
        if other.spec != self.spec:
            raise DomainError("only estimates with the same kernel spec can be merged")
        return DensityEstimate(self.spec, self.samples.concat(other.samples))


def feature_points(samples: SampleSet, limit: int = 64) -> np.ndarray:
    """Sample quantiles used as quadrature breakpoints."""
    count = min(samples.n, limit)
    return np.unique(np.quantile(samples.values, np.linspace(0.0, 1.0, count)))


def evaluate(estimate: DensityEstimate, x: float) -> float:
    """
    Evaluate (1/n) sum_i W(X_i, x).

    Raises:
        DomainError: Propagated from the weight function
    """
    return estimate.evaluate(x)
