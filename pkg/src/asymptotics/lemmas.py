"""
Direct quadrature of the integrals behind the A_k and B_k expansions, used as the
ground truth for the truncated series.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from loguru import logger

from src.errors import DomainError, MonotonicityViolation
from src.oracle.quadrature import integrate_positive

ScalarFn = Callable[[float], float]


def _integrate_around(fn: ScalarFn, center: float, width: float, lower: float,
                      abs_tol: float, rel_tol: float) -> float:
    """Integrate over (lower, inf), or the whole line for lower = -inf, split at ``center``."""
    marks = (1.0, 4.0, 10.0)
    if math.isfinite(lower):
        offset = center - lower
        points = [offset + s * m * width for m in marks for s in (-1.0, 1.0)] + [offset]
        return integrate_positive(lambda t: fn(lower + t), abs_tol, rel_tol,
                                  scale=max(offset, width), breakpoints=points).value
    points = [m * width for m in marks]
    right = integrate_positive(lambda t: fn(center + t), abs_tol / 2, rel_tol, scale=width, breakpoints=points)
    left = integrate_positive(lambda t: fn(center - t), abs_tol / 2, rel_tol, scale=width, breakpoints=points)
    return right.value + left.value


def lemma_balloon_integral_oracle(phi: ScalarFn, theta: ScalarFn, h_fn: ScalarFn, delta_fn: ScalarFn,
                                  p: int, x: float, lower: float = 0.0,
                                  abs_tol: float = 1e-12, rel_tol: float = 1e-10) -> float:
    """
    L = int dy phi((y - x - h^p(x) delta(x)) / h(x)) theta(y) / h(x).

    Args:
        phi (ScalarFn): Kernel-like weight
        theta (ScalarFn): Function integrated against it, zero below ``lower``
        h_fn (ScalarFn): Bandwidth h
        delta_fn (ScalarFn): Shift delta
        p (int): Kernel order
        x (float): Evaluation point
        lower (float): Left end of the support of theta
        abs_tol (float): Absolute quadrature tolerance
        rel_tol (float): Relative quadrature tolerance

    Returns:
        float: The integral
    """
    h = float(h_fn(x))
    if not h > 0:
        raise DomainError(f"bandwidth must be positive at x={x}, got {h}")
    center = x + h ** p * float(delta_fn(x))

    def integrand(y: float) -> float:
        return float(phi((y - center) / h)) * float(theta(y)) / h

    return _integrate_around(integrand, center, h, lower, abs_tol, rel_tol)


def change_of_variables(x: float, h_fn: ScalarFn, delta_fn: ScalarFn, p: int) -> Callable[[float], float]:
    """z(y) = (y - x + h^p(y) delta(y)) / h(y)."""
    def z(y: float) -> float:
        h = float(h_fn(y))
        return (y - x + h ** p * float(delta_fn(y))) / h
    return z


def check_monotone(z: Callable[[float], float], grid: np.ndarray) -> None:
    """
    Raises:
        MonotonicityViolation: If z is not strictly monotone on ``grid``
    """
    values = np.array([z(float(y)) for y in grid])
    steps = np.diff(values)
    if np.all(steps > 0) or np.all(steps < 0):
        return
    turn = int(np.flatnonzero(np.sign(steps[1:]) != np.sign(steps[:-1]))[0]) + 1 if steps.size > 1 else 0
    raise MonotonicityViolation(
        f"z(y, x) is not monotone in y; direction changes near y = {grid[turn]:.6g}"
    )


def lemma_smoothing_integral_oracle(phi: ScalarFn, theta: ScalarFn, h_fn: ScalarFn, delta_fn: ScalarFn,
                                    p: int, x: float, lower: float = 0.0,
                                    grid: Optional[np.ndarray] = None,
                                    abs_tol: float = 1e-12, rel_tol: float = 1e-10) -> float:
    """
    L = int dy phi((y - x + h^p(y) delta(y)) / h(y)) theta(y) / h(y).

    The change of variables z(y) must be strictly monotone for the series expansion to
    hold; it is sampled on ``grid`` (by default 4000 geometric points spanning x/100 to
    100 x on positive domains, or x +- 50 h(x) on the line) before integrating.

    Raises:
        MonotonicityViolation: If z(y) changes direction on the grid
    """
    h_x = float(h_fn(x))
    if grid is None:
        if math.isfinite(lower):
            span = x - lower
            grid = lower + np.geomspace(span / 100.0, span * 100.0, 4000)
        else:
            grid = np.linspace(x - 50.0 * h_x, x + 50.0 * h_x, 4000)
    z = change_of_variables(x, h_fn, delta_fn, p)
    check_monotone(z, grid)

    def integrand(y: float) -> float:
        return float(phi(z(y))) * float(theta(y)) / float(h_fn(y))

    value = _integrate_around(integrand, x, h_x, lower, abs_tol, rel_tol)
    logger.debug("smoothing oracle at x={:g}: {:.12g}", x, value)
    return value
