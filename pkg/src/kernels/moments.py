"""
Symmetric kernels and their moments.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from loguru import logger
from scipy import stats
from scipy.integrate import quad

from src.config import DEFAULTS, NumericsConfig
from src.dtos.kernel import KernelMoments, SymmetricKernel
from src.errors import DomainError

_SQRT5 = math.sqrt(5.0)


def _epanechnikov_unit_variance(z: np.ndarray) -> np.ndarray:
    u = z / _SQRT5
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u ** 2) / _SQRT5, 0.0)


GAUSSIAN_KERNEL = SymmetricKernel("gaussian", stats.norm.pdf)
EPANECHNIKOV_KERNEL = SymmetricKernel("epanechnikov", _epanechnikov_unit_variance, (-_SQRT5, _SQRT5))


def _integrate_line(fn, support: tuple[float, float], config: NumericsConfig) -> float:
    lo, hi = support
    value, _ = quad(fn, lo, hi, epsabs=config.quad_abs_tol, epsrel=config.quad_rel_tol,
                    limit=config.quad_limit)
    return value


def kernel_moments(kernel: SymmetricKernel, p_max: int = 4, tolerance: Optional[float] = None,
                   config: Optional[NumericsConfig] = None) -> KernelMoments:
    """
    Classify a kernel by its order and compute kappa = int K^2.

    The order p is the smallest k > 0 with m_k = 1, provided m_1..m_{p-1} all vanish.

    Args:
        kernel (SymmetricKernel): Kernel to classify
        p_max (int): Highest moment examined. Defaults to 4.
        tolerance (Optional[float]): Tolerance on the moment conditions. Defaults to the configured value.
        config (Optional[NumericsConfig]): Numerical defaults

    Returns:
        KernelMoments: Order, kappa and the moments m_0..m_p

    Raises:
        DomainError: If m_0 differs from 1, or no order up to ``p_max`` fits
    """
    config = config or DEFAULTS
    tolerance = config.order_tol if tolerance is None else tolerance
    if p_max < 2:
        raise DomainError(f"p_max must be at least 2, got {p_max}")

    def K(z: float) -> float:
        return float(kernel(z))

    moments = [_integrate_line(K, kernel.support, config)]
    if abs(moments[0] - 1.0) >= tolerance:
        raise DomainError(f"kernel {kernel.name} integrates to {moments[0]:.8g}, not 1")

    order = None
    for k in range(1, p_max + 1):
        m_k = _integrate_line(lambda z, k=k: K(z) * z ** k, kernel.support, config)
        moments.append(m_k)
        if abs(m_k - 1.0) < tolerance:
            order = k
            break
        if abs(m_k) >= tolerance:
            raise DomainError(f"kernel {kernel.name}: moment m_{k} = {m_k:.8g} neither vanishes nor equals 1")
    if order is None:
        raise DomainError(f"kernel {kernel.name} has no order up to {p_max}")

    kappa = _integrate_line(lambda z: K(z) ** 2, kernel.support, config)
    logger.debug("kernel {}: order {}, kappa {:.10g}", kernel.name, order, kappa)
    return KernelMoments(order=order, kappa=kappa, moments=tuple(moments))
