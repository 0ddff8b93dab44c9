from __future__ import annotations

from typing import Sequence

import numpy as np
from loguru import logger
from scipy.stats import linregress

from src.errors import DomainError


def fit_rate(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Least-squares slope of log y against log x.

    Raises:
        DomainError: For fewer than three points, mismatched lengths, non-positive
            values, or identical xs
    """
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise DomainError("need two sequences of equal length, at least three points each")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("rates are fitted to positive values only")
    if np.all(xs == xs[0]):
        raise DomainError("cannot fit a rate when all xs are equal")
    fit = linregress(np.log(xs), np.log(ys))
    logger.debug("rate fit: slope {:.4f} (stderr {:.2g})", fit.slope, fit.stderr)
    return float(fit.slope)
