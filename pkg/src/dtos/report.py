from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np

from src.errors import DomainError

INTEGRATED = "integrated"


@dataclass(frozen=True)
class AsymptoticReport:
    """
    Leading-order bias, variance and MSE at a point, or integrated over the domain.

    For integrated reports ``bias`` is the root integrated squared bias, so that
    ``mse`` is the MISE.
    """
    bias: float
    variance: float
    at: Union[float, Literal["integrated"]]
    leading_order: dict[str, int] = field(default_factory=lambda: {"bias": 2, "variance": -1})
    mse: float = field(init=False)

    def __post_init__(self):
        if self.variance < 0:
            raise DomainError(f"variance must be non-negative, got {self.variance}")
        object.__setattr__(self, "mse", self.bias ** 2 + self.variance)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True, eq=False)
class MiseProfile:
    """
    Cross-validation scores and asymptotic MISE values over a bandwidth grid. A NaN
    score marks a grid point where the leave-one-out score is undefined.
    """
    sigmas: np.ndarray
    cv_scores: np.ndarray
    asymptotic_mise: Optional[np.ndarray]
    cv_argmin: float
    plugin_sigma: Optional[float] = None

    def __post_init__(self):
        if len(self.cv_scores) != len(self.sigmas):
            raise DomainError("cv_scores and sigmas differ in length")
        if self.asymptotic_mise is not None and len(self.asymptotic_mise) != len(self.sigmas):
            raise DomainError("asymptotic_mise and sigmas differ in length")

    @property
    def asymptotic_argmin(self) -> Optional[float]:
        if self.asymptotic_mise is None:
            return None
        return float(self.sigmas[int(np.argmin(self.asymptotic_mise))])

    @property
    def interior_minimum(self) -> bool:
        i = int(np.nanargmin(self.cv_scores))
        return 0 < i < len(self.sigmas) - 1


@dataclass(frozen=True, eq=False)
class McSummary:
    """
    Monte Carlo estimates of pointwise bias and variance and of the MISE.

    Each statistic is stored as an (estimate, standard error) pair.
    """
    point_bias: dict[float, tuple[float, float]]
    point_variance: dict[float, tuple[float, float]]
    mise: Optional[tuple[float, float]]
    replications: int
    n_per_rep: int
    seed: int
    sigma: float
    estimates: np.ndarray = field(repr=False)
