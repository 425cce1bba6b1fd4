r"""Integer-order Bessel functions of the first kind.

:math:`J_k(z)` for :math:`k = 0..M` is computed in one sweep by Miller's
backward recurrence

.. math::
    J_{k-1}(z) = \frac{2k}{z} J_k(z) - J_{k+1}(z)

started well above the last order needed and normalized with
:math:`J_0^2 + 2\sum_{k\ge1} J_k^2 = 1`; the sign is fixed by
:math:`J_0 + 2\sum_{k\ge1} J_{2k} = 1`. Arguments up to 4 use the power series
instead. Negative orders follow :math:`J_{-m} = (-1)^m J_m`.

A table is built twice from two different starting orders; the largest
disagreement is its error bound, and a table whose bound misses the requested
tolerance raises :class:`ToleranceUnreachable`.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np
from scipy.special import gammaln

from ..errors import ParameterError, ToleranceUnreachable, TooCloseToEdge

log = logging.getLogger(__name__)

SERIES_MAX_ARG = 4.0
_RESCALE = 1e250


class Evaluation(NamedTuple):
    value: float
    bound: float


def edge_order(z: float) -> int:
    """Order beyond which |J_k(z)| is below 1e-30."""
    return int(math.ceil(z + 22.0 * (z / 2.0) ** (1.0 / 3.0) + 20.0))


def _series(z: float, top: int) -> np.ndarray:
    k = np.arange(top + 1, dtype=np.float64)
    if z == 0.0:
        out = np.zeros(top + 1)
        out[0] = 1.0
        return out
    half = z / 2.0
    term = np.exp(k * math.log(half) - gammaln(k + 1.0))
    total = term.copy()
    for m in range(1, 200):
        term = term * (-(half * half) / (m * (m + k)))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller(z: float, top: int, start: int) -> np.ndarray:
    f = np.zeros(start + 2)
    f[start] = 1.0
    for k in range(start, 0, -1):
        f[k - 1] = (2.0 * k / z) * f[k] - f[k + 1]
        if abs(f[k - 1]) > _RESCALE:
            f[k - 1:] /= _RESCALE
    f /= np.max(np.abs(f))
    norm = math.sqrt(f[0] * f[0] + 2.0 * float(np.dot(f[1:], f[1:])))
    sign = math.copysign(1.0, f[0] + 2.0 * float(np.sum(f[2::2])))
    return (sign / norm) * f[: top + 1]


def miller_start(top: int, z: float) -> int:
    base = max(float(top), z)
    return int(base + 20.0 + 10.0 * math.sqrt(base))


@dataclass(frozen=True, eq=False)
class BesselTable:
    """J_0..J_M at one argument; orders beyond M read as 0."""
    z: float
    values: np.ndarray
    bound: float

    @property
    def max_order(self) -> int:
        return len(self.values) - 1

    def j(self, order: int) -> float:
        m = abs(int(order))
        if m > self.max_order:
            return 0.0
        v = float(self.values[m])
        return -v if (order < 0 and m % 2) else v

    def j_array(self, orders) -> np.ndarray:
        orders = np.asarray(orders, dtype=np.int64)
        m = np.abs(orders)
        inside = m <= self.max_order
        v = np.where(inside, self.values[np.minimum(m, self.max_order)], 0.0)
        return np.where((orders < 0) & (m % 2 == 1), -v, v)

    def tail_sq_sum(self, x: int) -> float:
        """Σ_{k > x} J_k²; for x < 0 read as 1 − Σ_{m ≥ −x} J_m²."""
        suffix = self._suffix
        if x >= 0:
            return float(suffix[x + 1]) if x + 1 <= self.max_order else 0.0
        m = -x
        return 1.0 - (float(suffix[m]) if m <= self.max_order else 0.0)

    @property
    def _suffix(self) -> np.ndarray:
        cached = self.__dict__.get("_suffix_cache")
        if cached is None:
            sq = self.values * self.values
            cached = np.concatenate((np.cumsum(sq[::-1])[::-1], [0.0]))
            object.__setattr__(self, "_suffix_cache", cached)
        return cached


@lru_cache(maxsize=64)
def _cached_table(z: float, top: int, tol: float) -> BesselTable:
    if z <= SERIES_MAX_ARG:
        values = _series(z, top)
        return BesselTable(z=z, values=values, bound=1e-15)
    start = miller_start(top, z)
    first = _miller(z, top, start)
    second = _miller(z, top, start + 20 + int(5 * math.sqrt(start)))
    bound = float(np.max(np.abs(first - second) / np.maximum(1.0, np.abs(second))))
    if bound > tol:
        raise ToleranceUnreachable(f"Bessel table at z={z} reaches {bound:.3e}, asked for {tol:.3e}")
    log.debug("bessel table z=%g orders 0..%d start %d bound %.2e", z, top, start, bound)
    values = second
    values.flags.writeable = False
    return BesselTable(z=z, values=values, bound=max(bound, 1e-16))


def bessel_table(z: float, max_order: int = 0, tol: float = 1e-10) -> BesselTable:
    if z < 0:
        raise ParameterError(f"Bessel argument must be nonnegative, got {z}")
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    top = max(edge_order(z), abs(int(max_order)) + 1)
    return _cached_table(float(z), top, float(tol))


def bessel_j(order: int, arg: float, tol: float = 1e-10, with_bound: bool = False) -> Union[float, Evaluation]:
    table = bessel_table(arg, abs(int(order)), tol)
    value = table.j(order)
    if with_bound:
        return Evaluation(value, table.bound * max(1.0, abs(value)))
    return value


def debye_envelope(x: int, theta: float) -> float:
    cos_u = x / (2.0 * theta)
    return 1.0 / math.sqrt(math.pi * theta * math.sqrt(1.0 - cos_u * cos_u))


def debye_leading(x: int, theta: float, margin: float = 0.05) -> float:
    """Leading Debye term of J_x(2θ) in the oscillatory range, cos u = x/2θ."""
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if margin < 0.05:
        raise ParameterError(f"edge margin must be at least 0.05, got {margin}")
    if abs(x) >= 2.0 * theta * (1.0 - margin):
        raise TooCloseToEdge(f"order {x} is within {margin:.0%} of the turning point 2θ = {2 * theta:g}")
    u = math.acos(x / (2.0 * theta))
    sin_u = math.sin(u)
    return math.cos(2.0 * theta * sin_u - x * u - math.pi / 4.0) / math.sqrt(math.pi * theta * sin_u)
