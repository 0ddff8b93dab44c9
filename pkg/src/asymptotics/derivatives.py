"""
Reference densities and the finite-difference machinery behind the series coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np
from loguru import logger
from scipy.special import comb

from src.errors import DomainError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Derivative:
    value: float
    error: float


def central_derivative(fn: Callable[[float], float], x: float, order: int,
                       lower: float = -math.inf, step: Optional[float] = None) -> Derivative:
    """
    Estimate the ``order``-th derivative of ``fn`` at ``x``.

    Central binomial differences at steps s, s/2 and s/4 are combined by two rounds of
    Richardson extrapolation. The error combines the disagreement of the last two
    extrapolants with the rounding error of the finest stencil.

    Args:
        fn (Callable[[float], float]): Function to differentiate
        x (float): Point
        order (int): Derivative order, >= 0
        lower (float): Left end of the domain of ``fn``; stencils stay inside it
        step (Optional[float]): Initial step

    Returns:
        Derivative: Estimate and error bound
    """
    if order < 0:
        raise DomainError(f"derivative order must be non-negative, got {order}")
    if order == 0:
        return Derivative(float(fn(x)), 0.0)
    if not x > lower:
        raise DomainError(f"x = {x} lies outside the domain (lower end {lower})")

    if step is None:
        scale = x - lower if math.isfinite(lower) else max(1.0, abs(x))
        step = 2.0 * scale * _EPS ** (1.0 / (order + 6))
    if math.isfinite(lower):
        step = min(step, 1.8 * (x - lower) / order)

    weights = np.array([(-1) ** i * comb(order, i, exact=True) for i in range(order + 1)], dtype=float)
    offsets = order / 2.0 - np.arange(order + 1)

    def stencil(s: float) -> tuple[float, float]:
        values = np.array([fn(x + o * s) for o in offsets], dtype=float)
        return float(weights @ values) / s ** order, float(np.abs(weights) @ np.abs(values)) * _EPS / s ** order

    d0, _ = stencil(step)
    d1, _ = stencil(step / 2)
    d2, rounding = stencil(step / 4)
    r0 = (4.0 * d1 - d0) / 3.0
    r1 = (4.0 * d2 - d1) / 3.0
    value = (16.0 * r1 - r0) / 15.0
    return Derivative(value, abs(value - r1) + rounding)


@dataclass(frozen=True)
class ReferenceDensity:
    """
    A density f with access to its derivatives.

    When ``analytic`` is given it returns f^(j)(x); otherwise derivatives come from
    finite differences of ``pdf``.
    """
    pdf: Callable[[float], float] = field(compare=False)
    analytic: Optional[Callable[[float, int], float]] = field(default=None, compare=False)
    max_order: int = 8
    domain: tuple[float, float] = (0.0, math.inf)

    def __call__(self, x: float) -> float:
        return float(self.pdf(x))

    def derivative_estimate(self, x: float, order: int) -> Derivative:
        if order > self.max_order:
            raise DomainError(f"derivatives only up to order {self.max_order}, got {order}")
        if self.analytic is not None:
            return Derivative(float(self.analytic(x, order)), 0.0)
        return central_derivative(self.pdf, x, order, lower=self.domain[0])

    def derivative(self, x: float, order: int) -> float:
        return self.derivative_estimate(x, order).value

    def check_derivatives(self, points: Iterable[float], orders: Iterable[int] = (1, 2, 3, 4),
                          tolerance: float = 1e-5) -> float:
        """
        Compare the supplied derivatives with finite differences of the pdf.

        Returns:
            float: Largest relative discrepancy

        Raises:
            DomainError: If a discrepancy exceeds ``tolerance``
        """
        worst = 0.0
        for x in points:
            for order in orders:
                estimate = central_derivative(self.pdf, float(x), order, lower=self.domain[0])
                supplied = self.derivative(float(x), order)
                scale = max(abs(supplied), abs(self.pdf(x)), 1e3 * _EPS)
                discrepancy = max(abs(supplied - estimate.value) - estimate.error, 0.0) / scale
                worst = max(worst, discrepancy)
                if discrepancy > tolerance:
                    raise DomainError(
                        f"derivative of order {order} at x={x}: supplied {supplied:.10g}, "
                        f"finite differences give {estimate.value:.10g}"
                    )
        logger.debug("derivative check passed, worst relative discrepancy {:.3g}", worst)
        return worst
