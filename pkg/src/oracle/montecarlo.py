"""
Monte Carlo counterparts of the bias, variance and MISE predictions.

Replication r draws its samples from stream (r,) of the run seed, so every statistic
is a deterministic function of (seed, replications) whatever the worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from src.bandwidth.cross_validation import loo_cv_score
from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelSpec
from src.dtos.report import McSummary
from src.dtos.sample import SampleSet
from src.errors import DomainError, KdeError
from src.estimators.weight_function import DensityEstimate, feature_points
from src.kernels.weights import lower_limit
from src.oracle.quadrature import integrate_positive, tail_cutoff
from src.reference.lognormal import LogNormalRef, ln_integral_of_square, ln_pdf, ln_sample
from src.tools.task_distributor import IndexSegment, TaskDistributor

T = TypeVar("T")


def replicate(handler: Callable[[int], T], replications: int, seed: int,
              workers: Optional[int] = None) -> list[T]:
    """
    Run ``handler(r)`` for r = 0..replications-1, one replication per block.

    A failing replication aborts the run; its index and the seed are logged.
    """
    def run(segment: IndexSegment) -> T:
        try:
            return handler(segment.start_idx)
        except KdeError as e:
            logger.error("replication {} (seed {}) failed: {}", segment.start_idx, seed, e)
            raise

    return TaskDistributor(1, workers, f"replications (seed {seed})").map(run, replications)


def integrated_squared_error(estimate: DensityEstimate, ref: LogNormalRef,
                             config: Optional[NumericsConfig] = None) -> float:
    """
    int_0^inf (f_hat - f)^2, truncated where both f_hat and f fall below the configured
    fraction of their peaks.

    Below the estimate's domain (sigma^2 for the improper RIG estimator) f_hat counts as
    zero, so that stretch contributes int_0^lower f^2 in closed form.
    """
    config = config or DEFAULTS
    lower = lower_limit(estimate.spec)
    points = feature_points(estimate.samples)
    points = points[points > lower]
    peak_hat = float(np.max(estimate.evaluate_grid(points), initial=0.0)) or 1.0
    mode = math.exp(ref.mu - ref.log_sd ** 2)
    peak_ref = float(ln_pdf(ref, mode))

    def envelope(t: float) -> float:
        x = lower + t
        return max(estimate.evaluate(x) / peak_hat, float(ln_pdf(ref, x)) / peak_ref)

    start = max(float(points[-1]) if points.size else 0.0, mode, ref.mean) - lower
    upper = tail_cutoff(envelope, max(start, estimate.spec.sigma ** 2), config.mise_tail, peak=1.0)

    def squared_error(t: float) -> float:
        x = lower + t
        return (estimate.evaluate(x) - float(ln_pdf(ref, x))) ** 2

    marks = np.concatenate([points - lower, [mode - lower]])
    inside = integrate_positive(squared_error, breakpoints=marks[marks > 0], upper=upper, config=config).value
    below = ln_integral_of_square(ref, lower) if lower > 0 else 0.0
    return inside + below


def _mean_and_error(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size))


def mc_estimator_summary(spec: KernelSpec, generating: LogNormalRef, n: int, sigma: float,
                         eval_points: ArrayLike, replications: int, seed: int,
                         with_mise: bool = True, workers: Optional[int] = None,
                         config: Optional[NumericsConfig] = None) -> McSummary:
    """
    Empirical bias, variance and MISE of an estimator over seeded replications.

    Args:
        spec (KernelSpec): Estimator family and role; its sigma is replaced
        generating (LogNormalRef): Distribution the samples are drawn from
        n (int): Samples per replication
        sigma (float): Bandwidth parameter
        eval_points (ArrayLike): Points where bias and variance are measured
        replications (int): Number of replications, >= 2
        seed (int): Run seed
        with_mise (bool): Also integrate the squared error of every replication
        workers (Optional[int]): Worker threads over replications
        config (Optional[NumericsConfig]): Numerical defaults

    Returns:
        McSummary: (estimate, standard error) pairs for every statistic
    """
    if replications < 2:
        raise DomainError(f"need at least two replications, got {replications}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    config = config or DEFAULTS
    spec = spec.with_sigma(sigma)
    points = np.asarray(eval_points, dtype=float).ravel()

    def one(r: int) -> tuple[np.ndarray, float]:
        samples = ln_sample(generating, n, seed, stream=(r,), config=config)
        estimate = DensityEstimate(spec, samples)
        ise = integrated_squared_error(estimate, generating, config) if with_mise else math.nan
        return estimate.evaluate_grid(points), ise

    results = replicate(one, replications, seed, workers or config.workers)
    estimates = np.vstack([values for values, _ in results])
    truth = np.asarray(ln_pdf(generating, points), dtype=float).reshape(points.shape)

    point_bias, point_variance = {}, {}
    for i, x in enumerate(points):
        column = estimates[:, i]
        mean, mean_error = _mean_and_error(column)
        point_bias[float(x)] = (mean - float(truth[i]), mean_error)
        point_variance[float(x)] = _mean_and_error((column - mean) ** 2 * replications / (replications - 1))

    mise = _mean_and_error(np.array([ise for _, ise in results])) if with_mise else None
    logger.info("monte carlo summary for {} at sigma = {:.6g}: {} replications of n = {}",
                spec.label, sigma, replications, n)
    return McSummary(point_bias=point_bias, point_variance=point_variance, mise=mise,
                     replications=replications, n_per_rep=n, seed=seed, sigma=sigma, estimates=estimates)


@dataclass(frozen=True)
class UnbiasednessCheck:
    """Mean of M + int f^2 against the simulated MISE, each with its standard error."""
    cv_estimate: tuple[float, float]
    mise: tuple[float, float]

    @property
    def z_score(self) -> float:
        spread = math.hypot(self.cv_estimate[1], self.mise[1])
        return abs(self.cv_estimate[0] - self.mise[0]) / spread


def cv_unbiasedness(spec: KernelSpec, generating: LogNormalRef, n: int, sigma: float,
                    replications: int, seed: int, workers: Optional[int] = None,
                    config: Optional[NumericsConfig] = None) -> UnbiasednessCheck:
    """
    Compare M(sigma) + int f^2, averaged over replications, with the simulated MISE.
    """
    if replications < 2:
        raise DomainError(f"need at least two replications, got {replications}")
    config = config or DEFAULTS
    spec = spec.with_sigma(sigma)
    offset = ln_integral_of_square(generating)

    def one(r: int) -> tuple[float, float]:
        samples: SampleSet = ln_sample(generating, n, seed, stream=(r,), config=config)
        score = loo_cv_score(spec, samples, sigma, config, workers=1)
        return score + offset, integrated_squared_error(DensityEstimate(spec, samples), generating, config)

    results = np.array(replicate(one, replications, seed, workers or config.workers))
    return UnbiasednessCheck(cv_estimate=_mean_and_error(results[:, 0]), mise=_mean_and_error(results[:, 1]))
