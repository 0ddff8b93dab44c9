"""
The log-normal reference distribution: density, analytic derivatives, sampling and
parameter estimation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.typing import ArrayLike
from scipy.stats import norm

from src.asymptotics.derivatives import ReferenceDensity
from src.config import DEFAULTS, NumericsConfig
from src.dtos.sample import SampleSet
from src.errors import DomainError, InsufficientSamples
from src.kernels.distributions import pdf_lognormal
from src.reference.streams import standard_normals


@dataclass(frozen=True)
class LogNormalRef:
    mu: float
    log_sd: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu}")
        if not (math.isfinite(self.log_sd) and self.log_sd > 0):
            raise DomainError(f"log_sd must be positive, got {self.log_sd}")

    @property
    def mean(self) -> float:
        return math.exp(self.mu + self.log_sd ** 2 / 2.0)

    @property
    def variance(self) -> float:
        return self.mean ** 2 * math.expm1(self.log_sd ** 2)

    def ppf(self, q: float) -> float:
        return math.exp(self.mu + self.log_sd * float(norm.ppf(q)))


def _positive_points(x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(x > 0):
        raise DomainError("log-normal reference is evaluated at positive points only")
    return x


def ln_pdf(ref: LogNormalRef, x: ArrayLike):
    return pdf_lognormal(_positive_points(x), ref.mu, ref.log_sd)


@lru_cache(maxsize=256)
def _derivative_polynomial(log_sd: float, order: int) -> Polynomial:
    # f^(j)(x) = f(x) x^-j P_j(log x - mu), P_{j+1} = P_j' - (1 + j + v / log_sd^2) P_j
    poly = Polynomial([1.0])
    for j in range(order):
        poly = poly.deriv() - poly * Polynomial([1.0 + j, 1.0 / log_sd ** 2])
    return poly


def ln_pdf_deriv(ref: LogNormalRef, x: ArrayLike, order: int):
    """
    Analytic derivative of the log-normal density.

    Args:
        ref (LogNormalRef): Reference distribution
        x (ArrayLike): Positive point(s)
        order (int): Derivative order j >= 0

    Returns:
        float or np.ndarray: f^(j)(x)
    """
    if order < 0:
        raise DomainError(f"derivative order must be non-negative, got {order}")
    x = _positive_points(x)
    poly = _derivative_polynomial(ref.log_sd, order)
    values = pdf_lognormal(x, ref.mu, ref.log_sd) * x ** (-order) * poly(np.log(x) - ref.mu)
    return float(values) if np.ndim(values) == 0 else values


def ln_sample(ref: LogNormalRef, n: int, seed: int, stream: Sequence[int] = (),
              config: Optional[NumericsConfig] = None) -> SampleSet:
    """
    Draw n samples exp(mu + log_sd Z) from a seeded Philox stream.

    Identical (seed, stream, n) always gives identical samples.
    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    config = config or DEFAULTS
    z = standard_normals(n, seed, stream, block_size=config.block_size, workers=config.workers)
    return SampleSet(np.exp(ref.mu + ref.log_sd * z))


def estimate_log_params(samples: SampleSet) -> tuple[float, float]:
    """
    Mean and standard deviation (n-1 divisor) of log X.

    A degenerate sample gives a zero standard deviation, which plugin rules reject.

    Raises:
        InsufficientSamples: For fewer than two samples
    """
    if samples.n < 2:
        raise InsufficientSamples(2, samples.n)
    return samples.log_mean, samples.log_std


def as_reference_density(ref: LogNormalRef) -> ReferenceDensity:
    return ReferenceDensity(pdf=partial(ln_pdf, ref), analytic=partial(ln_pdf_deriv, ref),
                            max_order=64, domain=(0.0, math.inf))


def ln_integral_of_square(ref: LogNormalRef, upper: float = math.inf) -> float:
    """
    int_0^upper f(x)^2 dx. Over the whole line this is exp(Sigma^2 / 4 - mu) / (2 sqrt(pi) Sigma);
    a finite ``upper`` multiplies it by Phi(sqrt(2) (log upper - mu + Sigma^2 / 2) / Sigma).
    """
    total = math.exp(ref.log_sd ** 2 / 4.0 - ref.mu) / (2.0 * math.sqrt(math.pi) * ref.log_sd)
    if math.isinf(upper):
        return total
    if not upper > 0:
        raise DomainError(f"upper limit must be positive, got {upper}")
    z = math.sqrt(2.0) * (math.log(upper) - ref.mu + ref.log_sd ** 2 / 2.0) / ref.log_sd
    return total * float(norm.cdf(z))
