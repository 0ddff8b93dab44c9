"""
Leave-one-out cross-validation.

M(sigma) = int f_hat^2 - (2/n) sum_i f_hat_{-i}(X_i) is an unbiased estimate of
MISE(sigma) - int f^2, so its minimiser estimates the MISE-optimal bandwidth.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike
from scipy.special import gammaln

from src.asymptotics.mise import mise_lognormal_reference
from src.bandwidth.plugin import plugin_bandwidth
from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.report import MiseProfile
from src.dtos.sample import SampleSet
from src.errors import DomainError, InsufficientSamples, NonConvergence, NumericalFailure
from src.estimators.weight_function import DensityEstimate
from src.kernels.weights import weight
from src.tools.task_distributor import IndexSegment, TaskDistributor

_LOG2 = math.log(2.0)
_LOG_MAX = math.log(np.finfo(float).max)
_CEILING_MARGIN = 0.99


def gamma_overlap(xi: ArrayLike, xj: ArrayLike, sigma: float):
    """
    Closed-form int G(x; 1 + xi/sigma^2, sigma^2) G(x; 1 + xj/sigma^2, sigma^2) dx.

    Evaluated in log space as
        log Gamma(1 + a + b) - (1 + a + b) log 2 - log Gamma(1 + a) - log Gamma(1 + b) - 2 log sigma
    with a = xi/sigma^2 and b = xj/sigma^2; the last term makes the result a density
    overlap with units of 1/length.

    Raises:
        DomainError: For negative locations or non-positive sigma
        NumericalFailure: If the result overflows
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    xi, xj = np.asarray(xi, dtype=float), np.asarray(xj, dtype=float)
    if np.any(xi < 0) or np.any(xj < 0):
        raise DomainError("overlap locations must be non-negative")
    s2 = sigma * sigma
    a, b = xi / s2, xj / s2
    log_value = gammaln(1.0 + a + b) - (1.0 + a + b) * _LOG2 - gammaln(1.0 + a) - gammaln(1.0 + b) - 2.0 * math.log(sigma)
    if np.any(log_value > _LOG_MAX):
        raise NumericalFailure("gamma overlap overflows double precision")
    value = np.exp(log_value)
    return float(value) if value.ndim == 0 else value


def _is_proper_gamma(spec: KernelSpec) -> bool:
    return spec.family is KernelFamily.GAMMA and spec.role is KernelRole.PROPER


def integral_of_square(spec: KernelSpec, samples: SampleSet, config: Optional[NumericsConfig] = None,
                       workers: Optional[int] = None) -> float:
    """
    int f_hat(x)^2 dx: closed form for the proper gamma estimator, quadrature otherwise.
    """
    config = config or DEFAULTS
    if not _is_proper_gamma(spec):
        return DensityEstimate(spec, samples).integrate_square(config).value

    values = samples.values
    s2 = spec.sigma ** 2
    a = values / s2
    own = gammaln(1.0 + a)
    log_sigma = math.log(spec.sigma)

    def block(segment: IndexSegment) -> float:
        rows = a[segment.as_slice(), None]
        total = rows + a[None, :]
        log_value = (gammaln(1.0 + total) - (1.0 + total) * _LOG2
                     - own[segment.as_slice(), None] - own[None, :] - 2.0 * log_sigma)
        return float(np.sum(np.exp(log_value)))

    rows = max(1, config.block_size // samples.n)
    distributor = TaskDistributor(rows, workers or config.workers, "overlap sum")
    return distributor.reduce_sum(block, samples.n) / samples.n ** 2


def leave_one_out_sum(spec: KernelSpec, samples: SampleSet, config: Optional[NumericsConfig] = None,
                      workers: Optional[int] = None) -> float:
    """sum_i f_hat_{-i}(X_i), each term averaging the n - 1 other weights."""
    config = config or DEFAULTS
    values = samples.values
    n = samples.n

    def block(segment: IndexSegment) -> float:
        at = values[segment.as_slice()]
        w = weight(spec, values[None, :], at[:, None])
        w[np.arange(segment.size), segment.start_idx + np.arange(segment.size)] = 0.0
        return float(np.sum(w))

    rows = max(1, config.block_size // n)
    distributor = TaskDistributor(rows, workers or config.workers, "leave-one-out sum")
    return distributor.reduce_sum(block, n) / (n - 1)


def loo_cv_score(spec: KernelSpec, samples: SampleSet, sigma: float,
                 config: Optional[NumericsConfig] = None, workers: Optional[int] = None) -> float:
    """
    Leave-one-out score M(sigma) = int f_hat^2 - (2/n) sum_i f_hat_{-i}(X_i).

    Args:
        spec (KernelSpec): Estimator family and role; its sigma is replaced
        samples (SampleSet): Observations
        sigma (float): Bandwidth parameter
        config (Optional[NumericsConfig]): Numerical defaults
        workers (Optional[int]): Worker threads for the pairwise sums

    Returns:
        float: M(sigma)

    Raises:
        InsufficientSamples: For fewer than two samples
        NonConvergence: If the squared-estimate quadrature fails; the message names sigma
    """
    if samples.n < 2:
        raise InsufficientSamples(2, samples.n)
    spec = spec.with_sigma(sigma)
    try:
        square = integral_of_square(spec, samples, config, workers)
    except NonConvergence as e:
        raise NonConvergence(f"integral of the squared estimate at sigma = {sigma:.6g}: {e}",
                             e.worst_interval) from e
    return square - 2.0 * leave_one_out_sum(spec, samples, config, workers) / samples.n


def sigma_ceiling(spec: KernelSpec, samples: SampleSet) -> float:
    """
    Supremum of the bandwidths whose leave-one-out score is defined.

    The improper RIG estimate only exists above sigma^2, so f_hat_{-i}(X_i) needs
    sigma^2 < min X_i; every other estimator is unbounded.
    """
    if spec.family is KernelFamily.RECIPROCAL_INVERSE_GAUSSIAN and spec.role is KernelRole.IMPROPER:
        return math.sqrt(float(np.min(samples.values)))
    return math.inf


def default_sigma_grid(spec: KernelSpec, samples: SampleSet, count: int = 40) -> np.ndarray:
    """
    Geometric grid over [plugin/5, 5 plugin], or [0.01, 2] when no plugin rule applies.

    The upper end is capped at 0.99 sigma_ceiling; a capped grid keeps a 25-fold span.
    """
    if spec.asymptotics_available and samples.log_std > 0:
        centre = plugin_bandwidth(spec, samples.log_mean, samples.log_std, samples.n)
        lo, hi = centre / 5.0, centre * 5.0
    else:
        lo, hi = 0.01, 2.0
    top = _CEILING_MARGIN * sigma_ceiling(spec, samples)
    if hi > top:
        logger.info("sigma grid for {} capped at {:.6g} (smallest sample {:.6g})",
                    spec.label, top, float(np.min(samples.values)))
        hi = top
        lo = min(lo, hi / 25.0)
    return np.geomspace(lo, hi, count)


def cv_profile(spec: KernelSpec, samples: SampleSet, sigma_grid: ArrayLike,
               config: Optional[NumericsConfig] = None, workers: Optional[int] = None) -> MiseProfile:
    """
    Cross-validation scores over a bandwidth grid, with the asymptotic MISE curve and
    plugin bandwidth for the estimated log-normal reference when they exist.

    Grid points are scored concurrently; ties in the minimum go to the smaller sigma.
    Grid points at or above ``sigma_ceiling`` get a NaN score and are skipped by the argmin.

    Raises:
        DomainError: If the grid is not strictly increasing and positive, or no grid
            point lies below the ceiling
        InsufficientSamples: For fewer than two samples
    """
    config = config or DEFAULTS
    sigmas = np.asarray(sigma_grid, dtype=float).ravel()
    if sigmas.size < 1 or np.any(sigmas <= 0) or np.any(np.diff(sigmas) <= 0):
        raise DomainError("sigma grid must be strictly increasing and positive")
    if samples.n < 2:
        raise InsufficientSamples(2, samples.n)
    ceiling = sigma_ceiling(spec, samples)
    defined = sigmas < ceiling
    if not np.any(defined):
        raise DomainError(f"{spec.label}: every grid sigma is at or above {ceiling:.6g}, "
                          "where the leave-one-out score is undefined")
    if not np.all(defined):
        logger.warning("{}: {} grid points at or above sigma = {:.6g} left unscored",
                       spec.label, int(np.sum(~defined)), ceiling)

    def score(segment: IndexSegment) -> list[float]:
        return [loo_cv_score(spec, samples, float(s), config, workers=1) if s < ceiling else math.nan
                for s in sigmas[segment.as_slice()]]

    distributor = TaskDistributor(1, workers or config.workers, "cv profile")
    scores = np.array([s for block in distributor.map(score, sigmas.size) for s in block])
    cv_argmin = float(sigmas[int(np.nanargmin(scores))])

    asymptotic, plugin = None, None
    if spec.asymptotics_available and samples.log_std > 0:
        mu, log_sd = samples.log_mean, samples.log_std
        asymptotic = np.array([mise_lognormal_reference(spec, mu, log_sd, samples.n, float(s)) for s in sigmas])
        plugin = plugin_bandwidth(spec, mu, log_sd, samples.n)
    logger.info("cv profile for {}: {} grid points, argmin sigma = {:.6g}", spec.label, sigmas.size, cv_argmin)
    return MiseProfile(sigmas=sigmas, cv_scores=scores, asymptotic_mise=asymptotic,
                       cv_argmin=cv_argmin, plugin_sigma=plugin)
