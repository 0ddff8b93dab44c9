from __future__ import annotations

from typing import Callable

import numpy as np

from src.dtos.request import GridSpec, Spacing
from src.errors import DomainError


def geometric_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if not (0 < lo < hi) or count < 2:
        raise DomainError(f"geometric grid needs 0 < lo < hi and count >= 2, got ({lo}, {hi}, {count})")
    return np.geomspace(lo, hi, count)


def arithmetic_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if not (lo < hi) or count < 2:
        raise DomainError(f"arithmetic grid needs lo < hi and count >= 2, got ({lo}, {hi}, {count})")
    return np.linspace(lo, hi, count)


def quantile_grid(ppf: Callable[[float], float], count: int,
                  lo_q: float = 1e-5, hi_q: float = 1.0 - 1e-5) -> np.ndarray:
    """Geometric grid between two quantiles of a positive distribution."""
    return geometric_grid(float(ppf(lo_q)), float(ppf(hi_q)), count)


def grid_from_spec(grid: GridSpec) -> np.ndarray:
    if grid.spacing is Spacing.GEOMETRIC:
        return geometric_grid(grid.min, grid.max, grid.count)
    return arithmetic_grid(grid.min, grid.max, grid.count)
