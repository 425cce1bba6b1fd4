from .base import DeterminantalKernel
from .bessel import (
    BesselKernel,
    BesselKernelParams,
    bessel_kernel,
    bessel_kernel_diag,
    besselmain_residual,
    besselmain_scan,
    kernel_fixed_point_residual,
    sine_limit_discrepancy,
)
from .determinantal import PatternVector, det_expectation
from .sine import SineKernel, SineKernelParams, sine_covariance, sine_density, sine_kernel
from .special import BesselTable, Evaluation, bessel_j, bessel_table, debye_leading
from ..errors import ParameterError


def get_kernel(name: str, **params) -> DeterminantalKernel:
    if name == "bessel":
        return BesselKernel(BesselKernelParams(**params))
    if name == "sine":
        return SineKernel(SineKernelParams(**params))
    raise ParameterError(f"Unknown kernel: {name}")
