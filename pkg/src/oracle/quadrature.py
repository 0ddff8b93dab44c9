"""
Adaptive quadrature over (0, inf) and the tail cut-offs used by MISE integrals.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Optional

import numpy as np
from loguru import logger
from scipy.integrate import quad

from src.config import DEFAULTS, NumericsConfig
from src.dtos.report import QuadratureResult
from src.errors import DomainError, NonConvergence

# Integrands must be resolved to this multiple of the requested tolerance before
# a run counts as failed; QUADPACK reports roundoff warnings well inside it.
_SLACK = 10.0


def integrate_positive(fn: Callable[[float], float],
                       abs_tol: Optional[float] = None,
                       rel_tol: Optional[float] = None,
                       *,
                       scale: float = 1.0,
                       breakpoints: Iterable[float] = (),
                       upper: Optional[float] = None,
                       config: Optional[NumericsConfig] = None) -> QuadratureResult:
    """
    Integrate ``fn`` over (0, upper), with ``upper=None`` meaning infinity.

    The semi-infinite range is mapped onto (0, 1) by x = scale * t / (1 - t), and the
    unit interval is split at the images of ``breakpoints`` before adaptive
    Gauss-Kronrod refinement runs on every piece.

    Args:
        fn (Callable[[float], float]): Integrand
        abs_tol (Optional[float]): Absolute tolerance. Defaults to the configured value.
        rel_tol (Optional[float]): Relative tolerance. Defaults to the configured value.
        scale (float): Length scale of the transform; put it near the bulk of the integrand
        breakpoints (Iterable[float]): Points in (0, upper) where the integrand has features
        upper (Optional[float]): Finite upper limit, or None for infinity
        config (Optional[NumericsConfig]): Numerical defaults

    Returns:
        QuadratureResult: Value, error estimate and number of integrand evaluations

    Raises:
        NonConvergence: If the error estimate misses the tolerance; the message names the worst subinterval
    """
    config = config or DEFAULTS
    abs_tol = config.quad_abs_tol if abs_tol is None else abs_tol
    rel_tol = config.quad_rel_tol if rel_tol is None else rel_tol
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")

    if upper is None:
        def integrand(t: float) -> float:
            if t >= 1.0:
                return 0.0
            x = scale * t / (1.0 - t)
            value = fn(x)
            return 0.0 if value == 0.0 else value * scale / (1.0 - t) ** 2

        def to_x(t: float) -> float:
            return math.inf if t >= 1.0 else scale * t / (1.0 - t)

        lo, hi = 0.0, 1.0
        cuts = [p / (p + scale) for p in breakpoints if 0 < p < math.inf]
    else:
        if upper <= 0:
            raise DomainError(f"upper limit must be positive, got {upper}")
        integrand = fn

        def to_x(t: float) -> float:
            return t

        lo, hi = 0.0, float(upper)
        cuts = [p for p in breakpoints if 0 < p < upper]

    edges = np.unique(np.concatenate([[lo], np.asarray(cuts, dtype=float), [hi]]))
    pieces = len(edges) - 1
    total, error, evaluations = 0.0, 0.0, 0
    worst, worst_error = None, -1.0
    for a, b in zip(edges[:-1], edges[1:]):
        out = quad(integrand, a, b, epsabs=abs_tol / pieces, epsrel=rel_tol,
                   limit=config.quad_limit, full_output=1)
        value, err, info = out[0], out[1], out[2]
        total += value
        error += err
        evaluations += int(info["neval"])
        last = int(info.get("last", 0))
        if err > worst_error:
            worst_error = err
            if last > 0:
                i = int(np.argmax(info["elist"][:last]))
                worst = (to_x(info["alist"][i]), to_x(info["blist"][i]))
            else:
                worst = (to_x(a), to_x(b))

    if error > _SLACK * max(abs_tol, rel_tol * abs(total)):
        raise NonConvergence(
            f"quadrature error {error:.3g} exceeds tolerance for value {total:.6g}", worst
        )
    return QuadratureResult(value=total, error_estimate=error, evaluations=evaluations)


def tail_cutoff(fn: Callable[[float], float], start: float, ratio: float,
                peak: Optional[float] = None, max_doublings: int = 200) -> float:
    """
    Find a point beyond ``start`` where ``fn`` has fallen below ``ratio`` times its peak.

    The peak is located on a geometric grid around ``start`` unless given. Doubling
    stops once two consecutive points sit below the threshold.

    Returns:
        float: Upper integration limit
    """
    if start <= 0:
        raise DomainError(f"start must be positive, got {start}")
    if peak is None:
        scan = np.geomspace(start * 1e-3, start * 1e2, 200)
        peak = max(abs(fn(float(x))) for x in scan)
    if peak == 0:
        return start
    threshold = ratio * peak
    x, quiet = start, 0
    for _ in range(max_doublings):
        x *= 2.0
        if abs(fn(x)) < threshold:
            quiet += 1
            if quiet == 2:
                logger.debug("tail cut-off at {:.6g} (ratio {:.1e})", x, ratio)
                return x
        else:
            quiet = 0
    raise NonConvergence(f"integrand does not fall below {ratio:g} of its peak", (start, x))
