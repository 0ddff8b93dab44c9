"""
Densities of the kernel families, evaluated in log space.

Every function accepts scalars or numpy arrays (broadcast together) and returns a
float for scalar input. Arguments t = 0 give the limit of the density: 0 for all
families except the gamma density, whose limit is 1/theta at k = 1 and infinite
for k < 1.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln, xlogy

from src.errors import DomainError

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


def _finish(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def _argument(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise DomainError("density argument must be non-negative")
    return t


def _positive(name: str, value: ArrayLike) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value) & (value > 0)):
        raise DomainError(f"{name} must be positive and finite")
    return value


def _real(name: str, value: ArrayLike) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise DomainError(f"{name} must be finite")
    return value


def _on_support(t: np.ndarray, log_density) -> np.ndarray:
    """Evaluate ``log_density`` where t > 0 and use -inf at t = 0."""
    inside = t > 0
    safe = np.where(inside, t, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        values = log_density(safe)
    return np.where(inside, values, -np.inf)


def log_pdf_gamma(t: ArrayLike, k: ArrayLike, theta: ArrayLike):
    t = _argument(t)
    k = _positive("shape k", k)
    theta = _positive("scale theta", theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = -k * np.log(theta) + xlogy(k - 1.0, t) - t / theta - gammaln(k)
    return _finish(values)


def log_pdf_lognormal(t: ArrayLike, mu: ArrayLike, sigma: ArrayLike):
    # sigma is the standard deviation of log t; tables often quote its square
    t = _argument(t)
    mu = _real("mu", mu)
    sigma = _positive("sigma", sigma)
    values = _on_support(
        t, lambda s: -_LOG_SQRT_2PI - np.log(sigma * s) - (np.log(s) - mu) ** 2 / (2.0 * sigma ** 2)
    )
    return _finish(values)


def log_pdf_birnbaum_saunders(t: ArrayLike, sigma: ArrayLike, lam: ArrayLike):
    t = _argument(t)
    sigma = _positive("sigma", sigma)
    lam = _positive("lambda", lam)

    def log_density(s):
        u = s * lam
        return (np.log1p(u) - np.log(2.0 * sigma) - _LOG_SQRT_2PI - 0.5 * np.log(lam)
                - 1.5 * np.log(s) - (u - 1.0) ** 2 / (2.0 * u * sigma ** 2))

    return _finish(_on_support(t, log_density))


def log_pdf_inverse_gaussian(t: ArrayLike, mu: ArrayLike, lam: ArrayLike):
    t = _argument(t)
    mu = _positive("mu", mu)
    lam = _positive("lambda", lam)
    values = _on_support(
        t, lambda s: 0.5 * np.log(lam) - _LOG_SQRT_2PI - 1.5 * np.log(s) - lam * (s - mu) ** 2 / (2.0 * s * mu ** 2)
    )
    return _finish(values)


def log_pdf_reciprocal_inverse_gaussian(t: ArrayLike, mu: ArrayLike, lam: ArrayLike):
    t = _argument(t)
    mu = _positive("mu", mu)
    lam = _positive("lambda", lam)
    values = _on_support(
        t, lambda s: 0.5 * np.log(lam) - _LOG_SQRT_2PI - 0.5 * np.log(s) - lam * (mu * s - 1.0) ** 2 / (2.0 * s * mu ** 2)
    )
    return _finish(values)


def pdf_gamma(t: ArrayLike, k: ArrayLike, theta: ArrayLike):
    """
    Gamma density theta^-k t^(k-1) exp(-t/theta) / Gamma(k).

    Args:
        t (ArrayLike): Argument, t >= 0
        k (ArrayLike): Shape, k > 0
        theta (ArrayLike): Scale, theta > 0

    Returns:
        float or np.ndarray: Density values

    Raises:
        DomainError: For negative arguments or non-positive parameters
    """
    return _finish(np.exp(log_pdf_gamma(t, k, theta)))


def pdf_lognormal(t: ArrayLike, mu: ArrayLike, sigma: ArrayLike):
    """Log-normal density with log-mean ``mu`` and log-standard-deviation ``sigma``; mean exp(mu + sigma^2/2)."""
    return _finish(np.exp(log_pdf_lognormal(t, mu, sigma)))


def pdf_birnbaum_saunders(t: ArrayLike, sigma: ArrayLike, lam: ArrayLike):
    """Birnbaum-Saunders density with shape ``sigma`` and inverse scale ``lam``; mean (2 + sigma^2) / (2 lam)."""
    return _finish(np.exp(log_pdf_birnbaum_saunders(t, sigma, lam)))


def pdf_inverse_gaussian(t: ArrayLike, mu: ArrayLike, lam: ArrayLike):
    """Inverse Gaussian density with mean ``mu`` and shape ``lam``."""
    return _finish(np.exp(log_pdf_inverse_gaussian(t, mu, lam)))


def pdf_reciprocal_inverse_gaussian(t: ArrayLike, mu: ArrayLike, lam: ArrayLike):
    """Density of 1/T for T inverse Gaussian(mu, lam); mean 1/mu + 1/lam."""
    return _finish(np.exp(log_pdf_reciprocal_inverse_gaussian(t, mu, lam)))


def mean_variance(family_value: str, *params: float) -> tuple[float, float]:
    """
    Closed-form mean and variance of a family in the parametrisation of its pdf function.

    Args:
        family_value (str): ``KernelFamily.value`` of an asymmetric family
        *params (float): The pdf parameters after ``t``

    Returns:
        tuple[float, float]: Mean and variance
    """
    a, b = params
    if family_value == "gamma":
        return a * b, a * b ** 2
    if family_value == "lognormal":
        mean = np.exp(a + b ** 2 / 2.0)
        return float(mean), float(mean ** 2 * np.expm1(b ** 2))
    if family_value == "birnbaum-saunders":
        return (2.0 + a ** 2) / (2.0 * b), a ** 2 * (4.0 + 5.0 * a ** 2) / (4.0 * b ** 2)
    if family_value == "inverse-gaussian":
        return a, a ** 3 / b
    if family_value == "reciprocal-inverse-gaussian":
        return 1.0 / a + 1.0 / b, 1.0 / (b * a) + 2.0 / b ** 2
    raise DomainError(f"no closed-form moments for family {family_value!r}")
