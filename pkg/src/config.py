"""
Numerical defaults shared by every module.
"""
from pydantic import BaseModel, ConfigDict, Field


class NumericsConfig(BaseModel):
    """
    Tolerances and limits used by quadrature, series evaluation and sampling.

    Instances are immutable; derive variants with ``model_copy(update=...)``.
    """
    model_config = ConfigDict(frozen=True)

    # quadrature
    quad_abs_tol: float = Field(1e-10, gt=0)
    quad_rel_tol: float = Field(1e-8, gt=0)
    quad_limit: int = Field(400, ge=50)
    integral_square_tail: float = Field(1e-14, gt=0, description="cut-off ratio for the tail of the squared estimate")
    mise_tail: float = Field(1e-12, gt=0, description="cut-off ratio for the tail of the MISE integrand")

    # kernels
    order_tol: float = Field(1e-6, gt=0)
    delta_cap: float = Field(1e6, gt=0)

    # series and finite differences
    series_tail_tol: float = Field(1e-12, gt=0)
    derivative_noise_tol: float = Field(1e-6, gt=0)

    # sampling and workers
    block_size: int = Field(4096, ge=1)
    workers: int = Field(1, ge=1)


DEFAULTS = NumericsConfig()
