from __future__ import annotations

from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from src.dtos.kernel import SymmetricKernel
from src.dtos.sample import SampleSet
from src.errors import DomainError


def sample_values(samples: Union[SampleSet, ArrayLike]) -> np.ndarray:
    """Observations as a float array; baselines accept real-valued samples."""
    if isinstance(samples, SampleSet):
        return samples.values
    values = np.asarray(samples, dtype=float).ravel()
    if values.size < 1 or not np.all(np.isfinite(values)):
        raise DomainError("samples must be a non-empty sequence of finite numbers")
    return values


def evaluate_standard_kde(samples: Union[SampleSet, ArrayLike], kernel: SymmetricKernel,
                          h: float, x: ArrayLike):
    """
    Fixed-bandwidth estimate (1/(n h)) sum_i K((X_i - x) / h).

    Args:
        samples (Union[SampleSet, ArrayLike]): Observations, real-valued
        kernel (SymmetricKernel): Kernel K
        h (float): Bandwidth, h > 0
        x (ArrayLike): Evaluation point(s)

    Returns:
        float or np.ndarray: Estimates

    Raises:
        DomainError: If h is not positive
    """
    if not (h > 0):
        raise DomainError(f"bandwidth must be positive, got {h}")
    values = sample_values(samples)
    x = np.asarray(x, dtype=float)
    z = (values - x[..., None]) / h
    out = np.mean(kernel(z), axis=-1) / h
    return float(out) if out.ndim == 0 else out
