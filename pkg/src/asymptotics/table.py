"""
Leading-order bias and variance of every asymmetric-kernel estimator, and the exact
finite-n moments they approximate.
"""
from __future__ import annotations

import math
from typing import Optional

from src.asymptotics.derivatives import ReferenceDensity
from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.report import AsymptoticReport
from src.errors import DomainError, UnsupportedAsymptotics
from src.kernels.weights import effective_bandwidth, shift_term, weight
from src.oracle.quadrature import integrate_positive

F = KernelFamily
_SQRT_PI = math.sqrt(math.pi)


def _require_asymptotics(spec: KernelSpec) -> None:
    if not spec.family.is_asymmetric:
        raise DomainError("leading-order tables cover the asymmetric families only")
    if not spec.asymptotics_available:
        raise UnsupportedAsymptotics(f"no asymptotic expansion exists for the {spec.label} estimator")


def table2_bias(spec: KernelSpec, x: float, f: ReferenceDensity) -> float:
    """
    Leading-order bias at x.

    Args:
        spec (KernelSpec): Estimator
        x (float): Evaluation point
        f (ReferenceDensity): True density

    Returns:
        float: Bias, proportional to sigma^2

    Raises:
        UnsupportedAsymptotics: For the proper inverse-Gaussian estimator
    """
    _require_asymptotics(spec)
    s2 = spec.sigma ** 2
    d1, d2 = f.derivative(x, 1), f.derivative(x, 2)
    family, proper = spec.family, spec.role is KernelRole.PROPER

    if family is F.GAMMA:
        return s2 * x * d2 / 2.0 if proper else s2 * (d1 + x * d2 / 2.0)
    if family in (F.LOG_NORMAL, F.BIRNBAUM_SAUNDERS):
        if proper:
            # (sigma^2 / 2) d/dx (x d/dx (x f))
            return s2 / 2.0 * (f(x) + 3.0 * x * d1 + x * x * d2)
        return s2 * x / 2.0 * (d1 + x * d2)
    if family is F.INVERSE_GAUSSIAN:
        return s2 * x ** 3 * d2 / 2.0
    # reciprocal inverse Gaussian mirrors the gamma rows with the roles swapped
    return s2 * (d1 + x * d2 / 2.0) if proper else s2 * x * d2 / 2.0


def table2_variance(spec: KernelSpec, x: float, f: ReferenceDensity, n: int) -> float:
    """
    Leading-order variance at x, identical for both roles.

    Raises:
        UnsupportedAsymptotics: For the proper inverse-Gaussian estimator
    """
    _require_asymptotics(spec)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not x > 0:
        raise DomainError(f"variance is defined for x > 0, got {x}")
    sigma = spec.sigma
    if spec.family in (F.GAMMA, F.RECIPROCAL_INVERSE_GAUSSIAN):
        scale = 2.0 * sigma * math.sqrt(math.pi * x)
    elif spec.family in (F.LOG_NORMAL, F.BIRNBAUM_SAUNDERS):
        scale = 2.0 * _SQRT_PI * sigma * x
    else:
        scale = 2.0 * _SQRT_PI * sigma * x ** 1.5
    return f(x) / (n * scale)


def asymptotic_report(spec: KernelSpec, x: float, f: ReferenceDensity, n: int) -> AsymptoticReport:
    return AsymptoticReport(bias=table2_bias(spec, x, f), variance=table2_variance(spec, x, f, n), at=x)


def exact_moments(spec: KernelSpec, f: ReferenceDensity, x: float, n: int,
                  config: Optional[NumericsConfig] = None) -> tuple[float, float]:
    """
    Exact mean and variance of the estimate at x under i.i.d. sampling from f.

    mean = int W(y, x) f(y) dy and variance = (int W(y, x)^2 f(y) dy - mean^2) / n.

    Returns:
        tuple[float, float]: Mean and variance of the estimate
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    config = config or DEFAULTS
    center = x + shift_term(spec, x)
    h = effective_bandwidth(spec, x)
    points = [c for c in (center - 8 * h, center - 2 * h, center, center + 2 * h, center + 8 * h) if c > 0]
    scale = max(center, h)

    def first(y: float) -> float:
        return weight(spec, y, x) * f(y)

    def second(y: float) -> float:
        return weight(spec, y, x) ** 2 * f(y)

    mean = integrate_positive(first, scale=scale, breakpoints=points, config=config).value
    square = integrate_positive(second, scale=scale, breakpoints=points, config=config).value
    return mean, (square - mean ** 2) / n
