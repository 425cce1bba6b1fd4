"""The discrete Bessel kernel of the poissonized Plancherel measure.

    J(x, y; θ²) = θ (J_x J_{y+1} − J_{x+1} J_y) / (x − y),   J_k = J_k(2θ)

On the diagonal the kernel is the tail sum Σ_{s ≥ 1} J_{x+s}(2θ)².
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from ..errors import DiagonalRequested, OutsideBulk, ParameterError
from .base import DeterminantalKernel
from .sine import SineKernelParams, sine_kernel
from .special import BesselTable, Evaluation, bessel_table

log = logging.getLogger(__name__)

MAX_TOL = 1e-6


@dataclass(frozen=True)
class BesselKernelParams:
    theta: float
    tol: float = 1e-10

    def __post_init__(self):
        if not self.theta > 0:
            raise ParameterError(f"theta must be positive, got {self.theta}")
        if not 0 < self.tol <= MAX_TOL:
            raise ParameterError(f"tol must lie in (0, {MAX_TOL:g}], got {self.tol}")

    @property
    def eta(self) -> float:
        return self.theta * self.theta

    @property
    def table(self) -> BesselTable:
        return bessel_table(2.0 * self.theta, 0, self.tol)


def bessel_kernel(p: BesselKernelParams, x: int, y: int, with_bound: bool = False) -> Union[float, Evaluation]:
    if x == y:
        raise DiagonalRequested(f"x == y == {x}; use bessel_kernel_diag for the diagonal")
    t = p.table
    jx, jx1, jy, jy1 = t.j(x), t.j(x + 1), t.j(y), t.j(y + 1)
    value = p.theta * (jx * jy1 - jx1 * jy) / (x - y)
    if with_bound:
        return Evaluation(value, 4.0 * p.theta * t.bound / abs(x - y))
    return value


def bessel_kernel_diag(p: BesselKernelParams, x: int, with_bound: bool = False) -> Union[float, Evaluation]:
    t = p.table
    value = min(1.0, max(0.0, t.tail_sq_sum(x)))
    if with_bound:
        return Evaluation(value, 2.0 * t.bound * math.sqrt(t.max_order + 1))
    return value


def kernel_row(p: BesselKernelParams, x: int, ys: np.ndarray) -> np.ndarray:
    """J(x, y) for an integer array ys, diagonal included."""
    t = p.table
    ys = np.asarray(ys, dtype=np.int64)
    jx, jx1 = t.j(x), t.j(x + 1)
    jy, jy1 = t.j_array(ys), t.j_array(ys + 1)
    diff = (x - ys).astype(np.float64)
    off = diff != 0
    row = np.empty(len(ys), dtype=np.float64)
    row[off] = p.theta * (jx * jy1[off] - jx1 * jy[off]) / diff[off]
    row[~off] = bessel_kernel_diag(p, x)
    return row


class BesselKernel(DeterminantalKernel):
    name = "bessel"

    def __init__(self, params: BesselKernelParams):
        self.params = params

    def off_diagonal(self, x: int, y: int) -> float:
        return bessel_kernel(self.params, x, y)

    def density(self, x: int) -> float:
        return bessel_kernel_diag(self.params, x)

    def describe(self) -> dict:
        return {"kernel": self.name, "theta": self.params.theta, "tol": self.params.tol}


def kernel_fixed_point_residual(p: BesselKernelParams, x: int, window: int) -> float:
    """|J(x,x) − Σ_{|y−x| ≤ window} J(x,y)²|; a window ≥ 4θ + 50 makes the cut negligible."""
    ys = np.arange(x - window, x + window + 1)
    row = kernel_row(p, x, ys)
    return abs(bessel_kernel_diag(p, x) - float(np.sum(row * row)))


def bulk_limit(n: int) -> float:
    return 2.0 * math.sqrt(n) - n ** (1.0 / 6.0)


def besselmain_residual(n: int, x: int, tol: float = 1e-10) -> float:
    """|J(x,x; n) − arccos(x/2√n)/π| · (2√n − |x|) at θ = √n."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if abs(x) > bulk_limit(n):
        raise OutsideBulk(f"|x| = {abs(x)} exceeds 2√n − n^(1/6) = {bulk_limit(n):.3f} for n = {n}")
    root = math.sqrt(n)
    p = BesselKernelParams(theta=root, tol=tol)
    density = bessel_kernel_diag(p, x)
    return abs(density - math.acos(x / (2.0 * root)) / math.pi) * (2.0 * root - abs(x))


class ScanResult(NamedTuple):
    constant: float
    at: int
    points: int


def besselmain_scan(n: int, tol: float = 1e-10) -> ScanResult:
    """Empirical constant: max of besselmain_residual over every admissible x."""
    limit = int(math.floor(bulk_limit(n)))
    best, where = -1.0, 0
    for x in range(-limit, limit + 1):
        r = besselmain_residual(n, x, tol)
        if r > best:
            best, where = r, x
    log.info("besselmain scan n=%d: max %.4g at x=%d over %d points", n, best, where, 2 * limit + 1)
    return ScanResult(constant=best, at=where, points=2 * limit + 1)


def sine_limit_discrepancy(n: int, max_lag: int = 5, tol: float = 1e-10) -> float:
    """max over |x| ≤ √n, 0 ≤ l ≤ max_lag of |J(x, x+l; n) − S(l, x/√n)|."""
    root = math.sqrt(n)
    p = BesselKernelParams(theta=root, tol=tol)
    reach = int(math.floor(root))
    worst = 0.0
    for x in range(-reach, reach + 1):
        row = kernel_row(p, x, np.arange(x, x + max_lag + 1))
        limit = sine_kernel(SineKernelParams(a=x / root), np.arange(max_lag + 1))
        worst = max(worst, float(np.max(np.abs(row - limit))))
    return worst
