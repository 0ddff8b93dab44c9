"""
Mean expansions of the shifted balloon and sample-smoothing estimators.

The balloon mean is sum_k A_k m_k with
    A_k = h^k sum_{j>=k} f^(j) (h^p delta)^(j-k) / (k! (j-k)!)
and the sample-smoothing mean is sum_k B_k m_k with
    B_k = sum_{j>=k} d^j/dx^j [f h^(k + p (j-k)) (-delta)^(j-k)] / (k! (j-k)!).
For an order-p kernel only k = 0 and k = p contribute at leading order.
"""
from __future__ import annotations

import math
from typing import Callable, Iterator, Optional

from loguru import logger

from src.asymptotics.derivatives import ReferenceDensity, central_derivative
from src.config import DEFAULTS, NumericsConfig
from src.dtos.report import AsymptoticReport
from src.errors import DerivativeNoise, DomainError
from src.estimators.shifted import ShiftedEstimatorDescriptor, ShiftedVariant

ScalarFn = Callable[[float], float]


def _truncation(k: int, p: int, J: Optional[int]) -> int:
    J = p + 4 if J is None else J
    if J < k:
        raise DomainError(f"truncation order J = {J} is below k = {k}")
    return J


def _sum_series(terms: Iterator[tuple[float, float]], config: NumericsConfig, label: str) -> float:
    """
    Add series terms until two consecutive ones drop below the tail tolerance.

    Raises:
        DerivativeNoise: If a term is swamped by its own error estimate while still
            significant against the partial sum
    """
    total, quiet = 0.0, 0
    for j, (term, noise) in enumerate(terms):
        total += term
        if noise > abs(term) and noise > config.derivative_noise_tol * abs(total):
            raise DerivativeNoise(f"{label}: term {j} = {term:.3g} is below its noise {noise:.3g}")
        if abs(term) < config.series_tail_tol * abs(total):
            quiet += 1
            if quiet == 2:
                logger.debug("{}: series stopped after {} terms", label, j + 1)
                break
        else:
            quiet = 0
    return total


def balloon_coefficient_A(k: int, x: float, f: ReferenceDensity, h_fn: ScalarFn, delta_fn: ScalarFn,
                          p: int, J: Optional[int] = None, config: Optional[NumericsConfig] = None) -> float:
    """
    Truncated coefficient A_k of the shifted balloon mean.

    Args:
        k (int): Coefficient index
        x (float): Evaluation point
        f (ReferenceDensity): True density
        h_fn (ScalarFn): Bandwidth h(x)
        delta_fn (ScalarFn): Shift delta(x)
        p (int): Kernel order
        J (Optional[int]): Highest derivative order. Defaults to p + 4.
        config (Optional[NumericsConfig]): Numerical defaults

    Returns:
        float: A_k(x)
    """
    config = config or DEFAULTS
    J = _truncation(k, p, J)
    h = float(h_fn(x))
    offset = h ** p * float(delta_fn(x))

    def terms():
        for j in range(k, J + 1):
            d = f.derivative_estimate(x, j)
            c = h ** k * offset ** (j - k) / (math.factorial(k) * math.factorial(j - k))
            yield d.value * c, d.error * abs(c)

    return _sum_series(terms(), config, f"A_{k}({x:g})")


def smoothing_coefficient_B(k: int, x: float, f: ReferenceDensity, h_fn: ScalarFn, delta_fn: ScalarFn,
                            p: int, J: Optional[int] = None, config: Optional[NumericsConfig] = None) -> float:
    """
    Truncated coefficient B_k of the shifted sample-smoothing mean.

    Derivatives of the products f h^(k + p (j-k)) (-delta)^(j-k) are taken by
    Richardson-extrapolated central differences.

    Raises:
        DerivativeNoise: If finite-difference noise exceeds a significant term
    """
    config = config or DEFAULTS
    J = _truncation(k, p, J)

    def terms():
        for j in range(k, J + 1):
            power = k + p * (j - k)

            def product(t: float, power=power, m=j - k) -> float:
                return f(t) * float(h_fn(t)) ** power * (-float(delta_fn(t))) ** m

            d = central_derivative(product, x, j, lower=f.domain[0])
            c = 1.0 / (math.factorial(k) * math.factorial(j - k))
            yield d.value * c, d.error * c

    return _sum_series(terms(), config, f"B_{k}({x:g})")


def shifted_bias(variant: ShiftedVariant, x: float, f: ReferenceDensity, h_fn: ScalarFn,
                 delta_fn: ScalarFn, p: int) -> float:
    """
    Leading-order bias of a shifted estimator.

    Balloon: h^p delta f' + h^p f^(p) / p!.
    Sample smoothing: -(f h^p delta)' + (h^p f)^(p) / p!.
    """
    if variant is ShiftedVariant.BALLOON:
        h = float(h_fn(x))
        return h ** p * float(delta_fn(x)) * f.derivative(x, 1) + h ** p * f.derivative(x, p) / math.factorial(p)

    lower = f.domain[0]
    drift = central_derivative(lambda t: f(t) * float(h_fn(t)) ** p * float(delta_fn(t)), x, 1, lower=lower)
    spread = central_derivative(lambda t: float(h_fn(t)) ** p * f(t), x, p, lower=lower)
    return -drift.value + spread.value / math.factorial(p)


def shifted_variance(x: float, f: ReferenceDensity, h_fn: ScalarFn, kappa: float, n: int) -> float:
    """Leading-order variance f(x) kappa / (n h(x)); the same for both variants."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    h = float(h_fn(x))
    if not h > 0:
        raise DomainError(f"bandwidth must be positive at x={x}, got {h}")
    return f(x) * kappa / (n * h)


def shifted_report(descriptor: ShiftedEstimatorDescriptor, x: float, f: ReferenceDensity,
                   n: int) -> AsymptoticReport:
    p = descriptor.order

    def h_fn(t):
        return float(descriptor.bandwidth_fn(t))

    def delta_fn(t):
        return float(descriptor.shift_fn(t))

    return AsymptoticReport(
        bias=shifted_bias(descriptor.variant, x, f, h_fn, delta_fn, p),
        variance=shifted_variance(x, f, h_fn, descriptor.moments.kappa, n),
        at=x,
        leading_order={"bias": p, "variance": -1},
    )
