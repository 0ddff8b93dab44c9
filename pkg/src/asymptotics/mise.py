"""
Asymptotic MISE under a log-normal reference density.

Integrating the squared leading-order bias and the variance against LN(mu, Sigma)
gives MISE(sigma) = A sigma^4 + B / (n sigma) with
    A = exp(c mu + c^2 Sigma^2 / 4) P(Sigma) / (128 sqrt(pi) Sigma^5)
    B = exp(a mu + a^2 Sigma^2 / 2) / (2 sqrt(pi))
where a is the power of x in the variance and (c, P) depend on the bias shape.
"""
from __future__ import annotations

import math

from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.report import INTEGRATED, AsymptoticReport
from src.errors import DomainError, UnsupportedAsymptotics

F = KernelFamily
_SQRT_PI = math.sqrt(math.pi)

# bias shapes: exponent c and polynomial coefficients of P in Sigma^2
_DRIFT_AND_CURVATURE = (-3.0, (12.0, 20.0, 9.0))   # sigma^2 (f' + x f'' / 2)
_CURVATURE = (-3.0, (12.0, 4.0, 1.0))              # sigma^2 x f'' / 2
_LOG_SCALE = (-1.0, (12.0, 4.0, 1.0))              # log-normal and Birnbaum-Saunders rows
_CUBIC_CURVATURE = (1.0, (12.0, 68.0, 225.0))      # sigma^2 x^3 f'' / 2

_VARIANCE_POWER = {
    F.GAMMA: -0.5,
    F.RECIPROCAL_INVERSE_GAUSSIAN: -0.5,
    F.LOG_NORMAL: -1.0,
    F.BIRNBAUM_SAUNDERS: -1.0,
    F.INVERSE_GAUSSIAN: -1.5,
}


def _bias_shape(spec: KernelSpec) -> tuple[float, tuple[float, float, float]]:
    if not spec.family.is_asymmetric:
        raise DomainError("the log-normal reference MISE covers the asymmetric families only")
    if not spec.asymptotics_available:
        raise UnsupportedAsymptotics(f"no asymptotic MISE exists for the {spec.label} estimator")
    proper = spec.role is KernelRole.PROPER
    if spec.family is F.GAMMA:
        return _CURVATURE if proper else _DRIFT_AND_CURVATURE
    if spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
        return _DRIFT_AND_CURVATURE if proper else _CURVATURE
    if spec.family is F.INVERSE_GAUSSIAN:
        return _CUBIC_CURVATURE
    return _LOG_SCALE


def mise_coefficients(spec: KernelSpec, mu: float, log_sd: float) -> tuple[float, float]:
    """
    Constants A and B of MISE = A sigma^4 + B / (n sigma).

    Only the family and role of ``spec`` matter; its sigma is ignored.

    Raises:
        UnsupportedAsymptotics: For the proper inverse-Gaussian estimator
    """
    if not log_sd > 0:
        raise DomainError(f"Sigma must be positive, got {log_sd}")
    c, (p0, p2, p4) = _bias_shape(spec)
    s2 = log_sd ** 2
    poly = p0 + p2 * s2 + p4 * s2 * s2
    A = math.exp(c * mu + c * c * s2 / 4.0) * poly / (128.0 * _SQRT_PI * log_sd ** 5)
    a = _VARIANCE_POWER[spec.family]
    B = math.exp(a * mu + a * a * s2 / 2.0) / (2.0 * _SQRT_PI)
    return A, B


def mise_lognormal_reference(spec: KernelSpec, mu: float, log_sd: float, n: int, sigma: float) -> float:
    """
    Asymptotic MISE of the estimator at bandwidth ``sigma`` for LN(mu, Sigma) data.

    Args:
        spec (KernelSpec): Estimator family and role
        mu (float): Logarithmic mean
        log_sd (float): Logarithmic standard deviation Sigma
        n (int): Sample size
        sigma (float): Bandwidth parameter

    Returns:
        float: A sigma^4 + B / (n sigma)
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    A, B = mise_coefficients(spec, mu, log_sd)
    return A * sigma ** 4 + B / (n * sigma)


def mise_stationary_point(spec: KernelSpec, mu: float, log_sd: float, n: int) -> float:
    """The minimiser (B / (4 A n))^(1/5) of the asymptotic MISE."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    A, B = mise_coefficients(spec, mu, log_sd)
    return (B / (4.0 * A * n)) ** 0.2


def mise_report(spec: KernelSpec, mu: float, log_sd: float, n: int, sigma: float) -> AsymptoticReport:
    """Integrated report; ``bias`` holds the root integrated squared bias."""
    A, B = mise_coefficients(spec, mu, log_sd)
    if n < 1 or not sigma > 0:
        raise DomainError(f"need n >= 1 and sigma > 0, got n={n}, sigma={sigma}")
    return AsymptoticReport(bias=math.sqrt(A) * sigma ** 2, variance=B / (n * sigma), at=INTEGRATED)
