from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.dtos.kernel import KernelFamily, KernelRole
from src.errors import DomainError


class Command(str, Enum):
    ESTIMATE = "estimate"
    BANDWIDTH = "bandwidth"
    VERIFY = "verify"
    SIMULATE = "simulate"


class BandwidthMode(str, Enum):
    PLUGIN = "plugin"
    CV = "cv"
    FIXED = "fixed"


class Spacing(str, Enum):
    GEOMETRIC = "geo"
    ARITHMETIC = "ari"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    min: float
    max: float
    count: int = Field(ge=2)
    spacing: Spacing = Spacing.GEOMETRIC

    @model_validator(mode="after")
    def _check_bounds(self) -> GridSpec:
        if not self.max > self.min:
            raise ValueError(f"grid max ({self.max}) must exceed grid min ({self.min})")
        if self.spacing is Spacing.GEOMETRIC and self.min <= 0:
            raise ValueError("a geometric grid needs a positive minimum")
        return self

    @classmethod
    def parse(cls, text: str) -> GridSpec:
        """
        Parse ``MIN:MAX:COUNT[:geo|ari]``.

        Raises:
            DomainError: If the text does not follow the pattern
        """
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise DomainError(f"grid must look like MIN:MAX:COUNT[:geo|ari], got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            spacing = Spacing(parts[3]) if len(parts) == 4 else Spacing.GEOMETRIC
            return cls(min=lo, max=hi, count=count, spacing=spacing)
        except ValueError as e:
            raise DomainError(f"invalid grid {text!r}: {e}") from e


class RunConfig(BaseModel):
    """
    Everything a CLI command needs, validated up front.
    """
    model_config = ConfigDict(frozen=True)

    command: Command
    kernel: KernelFamily = KernelFamily.GAMMA
    role: KernelRole = KernelRole.IMPROPER
    sigma: Optional[float] = Field(default=None, gt=0)
    bandwidth_mode: BandwidthMode = BandwidthMode.PLUGIN
    input_path: Optional[Path] = None
    grid: Optional[GridSpec] = None
    seed: int = 0
    replications: int = Field(default=200, ge=1)
    output_format: OutputFormat = OutputFormat.CSV
    output_path: Optional[Path] = None
    quick: bool = False
    workers: int = Field(default=1, ge=1)
    with_approximation: bool = False
    with_cv: bool = False
    # simulation settings
    mu: float = 1.0
    log_sd: float = Field(default=1.0, gt=0)
    n: int = Field(default=300, ge=1)
    # test-only: multiplies every acceptance tolerance
    tolerance_scale: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def _check_mode(self) -> RunConfig:
        if self.bandwidth_mode is BandwidthMode.FIXED and self.sigma is None:
            raise ValueError("fixed bandwidth mode requires sigma")
        if self.grid is not None and self.kernel.is_asymmetric and self.grid.min <= 0:
            raise ValueError("grids for positive-domain kernels need a positive minimum")
        if self.command is Command.SIMULATE and self.replications < 2:
            raise ValueError("simulation needs at least two replications")
        return self
