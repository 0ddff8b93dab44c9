"""
Asymmetric kernels as weight functions W(y, x) of a sample y and an evaluation point x.

Improper weights are densities in the sample y, parametrised by the evaluation
point x. Proper weights swap the two roles, so every term is a density in x and the
estimate integrates to one.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from loguru import logger
from numpy.typing import ArrayLike

from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.errors import DomainError
from src.kernels import distributions as dist
from src.oracle.quadrature import integrate_positive

F = KernelFamily


def _location_domain(spec: KernelSpec, at: np.ndarray) -> np.ndarray:
    """Check the kernel location (x for improper, y for proper) and return it."""
    s2 = spec.sigma ** 2
    if np.any(np.isnan(at)):
        raise DomainError("kernel location must be a number")
    if spec.family is F.GAMMA:
        if np.any(at < 0):
            raise DomainError("gamma kernel location must be non-negative")
    elif spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
        if spec.role is KernelRole.IMPROPER and np.any(at <= s2):
            raise DomainError(
                f"improper reciprocal inverse Gaussian kernel needs x > sigma^2 = {s2:.6g}"
            )
        if np.any(at <= 0):
            raise DomainError("kernel location must be positive")
    elif np.any(at <= 0):
        raise DomainError(f"{spec.family.value} kernel location must be positive")
    return at


def _rig_log_kernel(argument: np.ndarray, at: np.ndarray, sigma: float, role: KernelRole) -> np.ndarray:
    s2 = sigma ** 2
    lam = 1.0 / s2
    if role is KernelRole.IMPROPER:
        return np.asarray(dist.log_pdf_reciprocal_inverse_gaussian(argument, 1.0 / (at - s2), lam))
    # proper: samples at or below sigma^2 use the mu -> inf limit, a gamma(1/2, 2 sigma^2) density
    regular = at > s2
    safe_at = np.where(regular, at, 2.0 * s2)
    values = np.asarray(dist.log_pdf_reciprocal_inverse_gaussian(argument, 1.0 / (safe_at - s2), lam))
    if np.all(regular):
        return values
    logger.debug("{} proper RIG samples at or below sigma^2 use the limiting kernel", int(np.sum(~regular)))
    limit = np.asarray(dist.log_pdf_gamma(argument, 0.5, 2.0 * s2))
    return np.where(regular, values, limit)


def log_weight(spec: KernelSpec, y: ArrayLike, x: ArrayLike) -> np.ndarray:
    """
    Logarithm of W(y, x); ``y`` and ``x`` broadcast against each other.

    Raises:
        DomainError: For the Gaussian family, invalid locations, or negative arguments
    """
    if not spec.family.is_asymmetric:
        raise DomainError("the Gaussian family has no weight-function parametrisation")
    y, x = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(x, dtype=float))
    if spec.role is KernelRole.IMPROPER:
        at, argument = x, y
    else:
        at, argument = y, x
    at = _location_domain(spec, at)
    sigma, s2 = spec.sigma, spec.sigma ** 2

    if spec.family is F.GAMMA:
        values = dist.log_pdf_gamma(argument, 1.0 + at / s2, s2)
    elif spec.family is F.LOG_NORMAL:
        values = dist.log_pdf_lognormal(argument, np.log(at), sigma)
    elif spec.family is F.BIRNBAUM_SAUNDERS:
        values = dist.log_pdf_birnbaum_saunders(argument, sigma, 1.0 / at)
    elif spec.family is F.INVERSE_GAUSSIAN:
        values = dist.log_pdf_inverse_gaussian(argument, at, 1.0 / s2)
    else:
        values = _rig_log_kernel(argument, at, sigma, spec.role)
    return np.asarray(values)


def weight(spec: KernelSpec, y: ArrayLike, x: ArrayLike):
    """
    Evaluate the weight function W(y, x).

    Args:
        spec (KernelSpec): Kernel family, role and bandwidth parameter
        y (ArrayLike): Sample(s)
        x (ArrayLike): Evaluation point(s)

    Returns:
        float or np.ndarray: Non-negative weights

    Raises:
        DomainError: When (RIG, improper) is evaluated at x <= sigma^2, and for invalid arguments
    """
    values = np.exp(log_weight(spec, y, x))
    return float(values) if values.ndim == 0 else values


def _kernel_location(spec: KernelSpec, at: np.ndarray) -> np.ndarray:
    if spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN and spec.role is KernelRole.PROPER:
        return np.maximum(at, spec.sigma ** 2)
    return at


def effective_bandwidth(spec: KernelSpec, at: ArrayLike):
    """
    Standard deviation h of the kernel located at ``at``.

    ``at`` is the evaluation point for improper kernels and the sample for proper ones.
    """
    at = _location_domain(spec, np.asarray(at, dtype=float))
    at = _kernel_location(spec, at)
    sigma, s2 = spec.sigma, spec.sigma ** 2
    if spec.family in (F.GAMMA, F.RECIPROCAL_INVERSE_GAUSSIAN):
        h = sigma * np.sqrt(at + s2)
    elif spec.family is F.LOG_NORMAL:
        h = at * np.exp(s2 / 2.0) * np.sqrt(np.expm1(s2))
    elif spec.family is F.BIRNBAUM_SAUNDERS:
        h = at * sigma * np.sqrt(1.0 + 5.0 * s2 / 4.0)
    elif spec.family is F.INVERSE_GAUSSIAN:
        h = sigma * at ** 1.5
    else:
        raise DomainError("the Gaussian family has no effective bandwidth")
    return float(h) if np.ndim(h) == 0 else h


def shift_term(spec: KernelSpec, at: ArrayLike):
    """
    Offset h^2 delta between the kernel mean and its location ``at``.
    """
    at = _location_domain(spec, np.asarray(at, dtype=float))
    s2 = spec.sigma ** 2
    if spec.family is F.GAMMA:
        shift = np.full_like(at, s2)
    elif spec.family is F.LOG_NORMAL:
        shift = at * np.expm1(s2 / 2.0)
    elif spec.family is F.BIRNBAUM_SAUNDERS:
        shift = at * s2 / 2.0
    elif spec.family is F.INVERSE_GAUSSIAN:
        shift = np.zeros_like(at)
    elif spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
        # zero, except where the proper kernel is pinned at sigma^2
        shift = _kernel_location(spec, at) - at
    else:
        raise DomainError("the Gaussian family has no shift")
    return float(shift) if np.ndim(shift) == 0 else shift


def _density_in_argument(spec: KernelSpec, at: float):
    if spec.role is KernelRole.IMPROPER:
        return lambda t: weight(spec, t, at)
    return lambda t: weight(spec, at, t)


def kernel_mean_variance(spec: KernelSpec, at: float,
                         config: Optional[NumericsConfig] = None) -> tuple[float, float]:
    """
    Mean and variance of the kernel located at ``at``, by quadrature over its argument.

    Returns:
        tuple[float, float]: Quadrature mean and variance
    """
    config = config or DEFAULTS
    density = _density_in_argument(spec, at)
    center = at + shift_term(spec, at)
    h = effective_bandwidth(spec, at)
    points = [p for p in (center - 6 * h, center - h, center, center + h, center + 6 * h) if p > 0]
    scale = max(center, h)
    mean = integrate_positive(lambda t: t * density(t), scale=scale, breakpoints=points, config=config).value
    variance = integrate_positive(lambda t: (t - mean) ** 2 * density(t), scale=scale,
                                  breakpoints=points, config=config).value
    return mean, variance


def standardized_moments(spec: KernelSpec, at: float, orders: tuple[int, ...] = (1, 2, 3, 4),
                         config: Optional[NumericsConfig] = None) -> tuple[float, ...]:
    """
    Moments of (t - at - h^2 delta) / h under the kernel located at ``at``.

    As sigma -> 0 these approach the standard normal moments (0, 1, 0, 3).
    """
    config = config or DEFAULTS
    density = _density_in_argument(spec, at)
    center = at + shift_term(spec, at)
    h = effective_bandwidth(spec, at)
    points = [p for p in (center - 8 * h, center - h, center, center + h, center + 8 * h) if p > 0]
    scale = max(center, h)
    return tuple(
        integrate_positive(lambda t, k=k: ((t - center) / h) ** k * density(t),
                           scale=scale, breakpoints=points, config=config).value
        for k in orders
    )


def lower_limit(spec: KernelSpec) -> float:
    """Left end of the evaluation domain: sigma^2 for the improper RIG estimator, else 0."""
    if spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN and spec.role is KernelRole.IMPROPER:
        return spec.sigma ** 2
    return 0.0

