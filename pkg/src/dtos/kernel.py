from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from src.errors import DomainError


class KernelFamily(Enum):
    GAMMA = "gamma"
    LOG_NORMAL = "lognormal"
    BIRNBAUM_SAUNDERS = "birnbaum-saunders"
    INVERSE_GAUSSIAN = "inverse-gaussian"
    RECIPROCAL_INVERSE_GAUSSIAN = "reciprocal-inverse-gaussian"
    GAUSSIAN = "gaussian"

    @property
    def is_asymmetric(self) -> bool:
        return self is not KernelFamily.GAUSSIAN

    @classmethod
    def parse(cls, text: str) -> KernelFamily:
        """
        Look up a family by value or by its short name (G, LN, BS, IG, RIG, N).

        Raises:
            DomainError: If the name matches no family
        """
        key = text.strip().lower()
        for family in cls:
            if key == family.value:
                return family
        if key in _ALIASES:
            return _ALIASES[key]
        raise DomainError(f"Unknown kernel family: {text}")


_ALIASES = {
    "g": KernelFamily.GAMMA,
    "ln": KernelFamily.LOG_NORMAL,
    "bs": KernelFamily.BIRNBAUM_SAUNDERS,
    "ig": KernelFamily.INVERSE_GAUSSIAN,
    "rig": KernelFamily.RECIPROCAL_INVERSE_GAUSSIAN,
    "n": KernelFamily.GAUSSIAN,
    "normal": KernelFamily.GAUSSIAN,
}


class KernelRole(Enum):
    PROPER = "proper"
    IMPROPER = "improper"


@dataclass(frozen=True)
class KernelSpec:
    """
    A kernel family, the role of the evaluation point, and the bandwidth parameter sigma.
    """
    family: KernelFamily
    role: KernelRole
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")

    @property
    def asymptotics_available(self) -> bool:
        # the proper inverse-Gaussian kernel breaks the monotone change of variables
        return not (self.family is KernelFamily.INVERSE_GAUSSIAN and self.role is KernelRole.PROPER)

    @property
    def label(self) -> str:
        return f"{self.role.value} {self.family.value}"

    def with_sigma(self, sigma: float) -> KernelSpec:
        return replace(self, sigma=sigma)


@dataclass(frozen=True)
class SymmetricKernel:
    """
    A kernel K(z) on the real line.

    Args:
        name (str): Display name
        fn (Callable[[np.ndarray], np.ndarray]): Vectorised kernel function
        support (tuple[float, float]): Interval outside which K vanishes. Defaults to the real line.
    """
    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    support: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=float))


@dataclass(frozen=True)
class KernelMoments:
    order: int
    kappa: float
    moments: tuple[float, ...]

    def __post_init__(self):
        if self.order < 1:
            raise DomainError(f"kernel order must be positive, got {self.order}")
        if not (0 < self.kappa < math.inf):
            raise DomainError(f"kappa must lie in (0, inf), got {self.kappa}")
