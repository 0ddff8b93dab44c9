"""
Closed-form plugin bandwidths for a log-normal reference density.
"""
from __future__ import annotations

import math

from loguru import logger

from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.sample import SampleSet
from src.errors import DomainError, UnsupportedAsymptotics
from src.reference.lognormal import estimate_log_params

F = KernelFamily
_TWO_POW_4_5 = 2.0 ** 0.8


def _gamma_shape_cell(mu: float, s2: float, poly: float) -> float:
    return math.exp(mu / 2.0 - 17.0 * s2 / 40.0) * poly ** -0.2


def plugin_bandwidth(spec: KernelSpec, mu: float, log_sd: float, n: int) -> float:
    """
    Bandwidth minimising the asymptotic MISE when the data are LN(mu, Sigma).

    Only the family and role of ``spec`` matter.

    Args:
        spec (KernelSpec): Estimator family and role
        mu (float): Logarithmic mean
        log_sd (float): Logarithmic standard deviation Sigma
        n (int): Sample size

    Returns:
        float: sigma*

    Raises:
        UnsupportedAsymptotics: For the proper inverse-Gaussian estimator
        DomainError: If Sigma <= 0 or n < 1
    """
    if not spec.family.is_asymmetric:
        raise DomainError("plugin rules cover the asymmetric families only")
    if not spec.asymptotics_available:
        raise UnsupportedAsymptotics(f"no plugin bandwidth exists for the {spec.label} estimator")
    if not (math.isfinite(log_sd) and log_sd > 0):
        raise DomainError(f"Sigma must be positive, got {log_sd}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")

    s2 = log_sd ** 2
    drift = spec.role is KernelRole.IMPROPER
    if spec.family is F.GAMMA or spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
        # the reciprocal inverse Gaussian swaps the gamma cells between roles
        if spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
            drift = not drift
        poly = 12.0 + 20.0 * s2 + 9.0 * s2 * s2 if drift else 12.0 + 4.0 * s2 + s2 * s2
        cell = _gamma_shape_cell(mu, s2, poly)
    elif spec.family is F.INVERSE_GAUSSIAN:
        cell = math.exp(7.0 * s2 / 40.0 - mu / 2.0) * (12.0 + 68.0 * s2 + 225.0 * s2 * s2) ** -0.2
    else:
        cell = math.exp(s2 / 20.0) * (12.0 + 4.0 * s2 + s2 * s2) ** -0.2
    return _TWO_POW_4_5 * log_sd * cell * n ** -0.2


def plugin_from_samples(spec: KernelSpec, samples: SampleSet) -> float:
    """Plugin bandwidth with mu and Sigma estimated from the log samples."""
    mu, log_sd = estimate_log_params(samples)
    sigma = plugin_bandwidth(spec, mu, log_sd, samples.n)
    logger.info("plugin bandwidth for {}: sigma = {:.6g} (mu = {:.6g}, Sigma = {:.6g}, n = {})",
                spec.label, sigma, mu, log_sd, samples.n)
    return sigma
