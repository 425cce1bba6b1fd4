"""The discrete sine kernel S(k, a) = sin(πρk)/(πk), ρ = arccos(a/2)/π."""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ParameterError
from .base import DeterminantalKernel


@dataclass(frozen=True)
class SineKernelParams:
    a: float

    def __post_init__(self):
        if not abs(self.a) < 2.0:
            raise ParameterError(f"sine kernel needs |a| < 2, got {self.a}")

    @property
    def rho(self) -> float:
        return sine_density(self.a)


def sine_density(a: float) -> float:
    return math.acos(a / 2.0) / math.pi


def sine_kernel(p: SineKernelParams, k: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    rho = p.rho
    out = rho * np.sinc(rho * np.asarray(k, dtype=np.float64))
    return float(out) if np.ndim(k) == 0 else out


def sine_covariance(p: SineKernelParams, i: int, j: int) -> float:
    """Cov(ω_i, ω_j) of the sine process occupation variables."""
    if i == j:
        rho = p.rho
        return rho * (1.0 - rho)
    s = sine_kernel(p, i - j)
    return -s * s


class SineKernel(DeterminantalKernel):
    name = "sine"

    def __init__(self, params: SineKernelParams):
        self.params = params

    def off_diagonal(self, x: int, y: int) -> float:
        return sine_kernel(self.params, x - y)

    def density(self, x: int) -> float:
        return self.params.rho

    def describe(self) -> dict:
        return {"kernel": self.name, "a": self.params.a}
