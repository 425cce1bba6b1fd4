"""The entropy constant H of the Plancherel measure.

H is the sum of two pieces:

* a triple integral over the sine-process parameter a ∈ (−2, 2), the lattice
  offset s ∈ [0, 1) and the window length h > 0 of the variance of the slope
  difference quotient (Φ_ω(s+h) − Φ_ω(s))/h, weighted by 1/4;
* the double series (32/π²) Σ_k Σ_l 1/(l(l+1)(2l+1) k^{2l−2} (4k²−1)).

The variance is a quadratic form in the sine-kernel covariances, so every
quantity here is deterministic. The a-integral is done in closed form by
default; s and h use quadrature with an itemized error budget.
"""
from __future__ import annotations
import logging
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from .config import EntropyConfig
from .errors import BudgetNotMet, ParameterError
from .kernels.sine import SineKernelParams, sine_covariance, sine_kernel
from .records import RecordKind
from .workflow import fan_out

log = logging.getLogger(__name__)

W1 = 3.0 - 4.0 * math.log(2.0)
SERIES_PREFACTOR = 32.0 / math.pi ** 2
_FFT_MIN = 512
_GEOMETRIC_RATIO = 1.2


# ---------------------------------------------------------------------------
# Series part
# ---------------------------------------------------------------------------

def _l_terms_needed(tol: float) -> int:
    # worst case k = 2: terms shrink by at least 1/4 per step
    return int(math.ceil(math.log(1.0 / tol) / math.log(4.0))) + 2


def hook_series_weights(ks: np.ndarray, tol: float = 1e-16) -> Tuple[np.ndarray, np.ndarray]:
    """w(k) = Σ_l 1/(l(l+1)(2l+1)k^{2l}) for an integer array ks ≥ 1, plus truncation bounds."""
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ks < 1):
        raise ParameterError("hook series weight needs k >= 1")
    L = _l_terms_needed(tol)
    inv2 = 1.0 / (ks * ks)
    values = np.zeros_like(ks)
    power = np.ones_like(ks)
    for l in range(1, L + 1):
        power = power * inv2
        values += power / (l * (l + 1) * (2 * l + 1))
    nxt = power * inv2 / ((L + 1) * (L + 2) * (2 * L + 3))
    # k = 1 has a closed form, so its geometric bound is never formed
    bounds = np.divide(nxt, 1.0 - inv2, out=np.zeros_like(ks), where=ks >= 2)
    values = np.where(ks == 1, W1, values)
    return values, bounds


def hook_series_weight(k: int, tol: float = 1e-16) -> float:
    if k < 1:
        raise ParameterError(f"hook series weight needs k >= 1, got {k}")
    if k == 1:
        return W1
    total, power, l = 0.0, 1.0, 1
    inv2 = 1.0 / (k * k)
    while True:
        power *= inv2
        term = power / (l * (l + 1) * (2 * l + 1))
        total += term
        if term < tol * total:
            return total
        l += 1


class SeriesEstimate(NamedTuple):
    value: float
    k_tail: float
    l_tail: float


def entropy_series(k_max: int = 200, tol: float = 1e-16) -> SeriesEstimate:
    if k_max < 10:
        raise ParameterError(f"k_max must be at least 10, got {k_max}")
    ks = np.arange(1, k_max + 1, dtype=np.float64)
    weights, bounds = hook_series_weights(ks, tol)
    factor = ks * ks / (4.0 * ks * ks - 1.0)
    head = float(np.sum(factor * weights))
    # l = 1 beyond k_max: Σ_{k>K} 1/(6(4k²−1)) = 1/(12(2K+1))
    l1_tail = 1.0 / (12.0 * (2 * k_max + 1))
    K = float(k_max)
    remainder = 1.0 / ((4.0 - 1.0 / K ** 2) * (1.0 - 1.0 / K ** 2)) / 30.0 / (3.0 * K ** 3)
    return SeriesEstimate(
        value=SERIES_PREFACTOR * (head + l1_tail),
        k_tail=SERIES_PREFACTOR * remainder,
        l_tail=SERIES_PREFACTOR * float(np.sum(factor * bounds)),
    )


# ---------------------------------------------------------------------------
# Slope weights and the variance integrand
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SlopeWeights:
    """w_i = |[i, i+1] ∩ [s, s+h]| / h for cells i = 0, 1, ..."""
    s: float
    h: float
    weights: np.ndarray

    def as_dict(self) -> Dict[int, float]:
        return {i: float(w) for i, w in enumerate(self.weights) if w > 0}

    def autocorrelation(self) -> np.ndarray:
        return _autocorrelation(self.weights)


def _weights(s: float, h: float) -> np.ndarray:
    end = s + h
    cells = np.arange(int(math.ceil(end)), dtype=np.float64)
    overlap = np.minimum(cells + 1.0, end) - np.maximum(cells, s)
    return np.maximum(overlap, 0.0) / h


def slope_weights(s: float, h: float) -> SlopeWeights:
    if not 0.0 <= s < 1.0:
        raise ParameterError(f"s must lie in [0, 1), got {s}")
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    return SlopeWeights(s=s, h=h, weights=_weights(s, h))


def _autocorrelation(w: np.ndarray) -> np.ndarray:
    """A(d) = Σ_i w_i w_{i+d} for d = 0..len(w)-1."""
    m = len(w)
    full = fftconvolve(w, w[::-1]) if m > _FFT_MIN else np.correlate(w, w, "full")
    return full[m - 1:]


def local_variance_integrand(a: float, s: float, h: float) -> float:
    """E_S(a) of the squared centered slope quotient: 4 Σ_ij w_i w_j Cov(ω_i, ω_j)."""
    p = SineKernelParams(a=a)
    acf = slope_weights(s, h).autocorrelation()
    lags = np.arange(1, len(acf))
    s2 = np.asarray(sine_kernel(p, lags)) ** 2
    value = 4.0 * (acf[0] * sine_covariance(p, 0, 0) - 2.0 * float(np.dot(acf[1:], s2)))
    return max(value, 0.0)


def exact_lag_coefficients(max_lag: int) -> np.ndarray:
    """Coefficients c(d) with ∫ local_variance_integrand da = Σ_d c(d) A(d)."""
    d = np.arange(max_lag + 1, dtype=np.float64)
    coeff = -2.0 * 4.0 * (8.0 / math.pi ** 2) / (4.0 * d * d - 1.0)
    coeff[0] = 4.0 * 8.0 / math.pi ** 2
    return coeff


def node_lag_coefficients(max_lag: int, a_nodes: int) -> np.ndarray:
    """Same coefficients with a = 2cos(πρ) and Gauss–Legendre nodes in ρ ∈ (0, 1)."""
    x, wts = np.polynomial.legendre.leggauss(a_nodes)
    rho = 0.5 * (x + 1.0)
    wts = 0.5 * wts * 2.0 * math.pi * np.sin(math.pi * rho)
    d = np.arange(1, max_lag + 1, dtype=np.float64)
    s = rho[:, None] * np.sinc(rho[:, None] * d[None, :])
    coeff = np.empty(max_lag + 1)
    coeff[0] = 4.0 * float(np.sum(wts * rho * (1.0 - rho)))
    coeff[1:] = -2.0 * 4.0 * (wts @ (s * s))
    return coeff


def integrated_variance(s: float, h: float) -> float:
    """∫_{−2}^{2} local_variance_integrand(a, s, h) da, in closed form."""
    acf = slope_weights(s, h).autocorrelation()
    return max(float(np.dot(exact_lag_coefficients(len(acf) - 1), acf)), 0.0)


# ---------------------------------------------------------------------------
# s/h quadrature
# ---------------------------------------------------------------------------

def h_panels(s: float, h_max: float, dense_h: int) -> np.ndarray:
    """Panel edges in h: unit panels ending on kinks k − s, then geometric growth."""
    edges = [0.0] + [k - s for k in range(1, int(dense_h) + 1) if k - s < h_max]
    x = edges[-1]
    while x < h_max:
        nxt = float(round(x * _GEOMETRIC_RATIO + s)) - s
        if nxt <= x:
            nxt = x + 1.0
        if nxt >= h_max - 0.5:
            nxt = h_max
        edges.append(nxt)
        x = nxt
    return np.asarray(edges)


def _gauss_nodes(edges: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def _moments(s: float, edges: np.ndarray, order: int, max_lag: int) -> np.ndarray:
    """M(d) = Σ_nodes weight · A_{s,h}(d)."""
    nodes, weights = _gauss_nodes(edges, order)
    out = np.zeros(max_lag + 1)
    for h, wt in zip(nodes, weights):
        acf = _autocorrelation(_weights(s, h))
        out[: len(acf)] += wt * acf
    return out


class _SNodeResult(NamedTuple):
    moments: np.ndarray
    moments_half_order: np.ndarray
    fit_acf: np.ndarray


def _s_node_task(s: float, *, h_max: float, dense_h: int, order: int, max_lag: int,
                 fit_h: Optional[np.ndarray]) -> _SNodeResult:
    edges = h_panels(s, h_max, dense_h)
    full = _moments(s, edges, order, max_lag)
    if fit_h is None:
        return _SNodeResult(full, full, np.zeros((0, max_lag + 1)))
    half = _moments(s, edges, max(2, order // 2), max_lag)
    fit = np.zeros((len(fit_h), max_lag + 1))
    for row, h in enumerate(fit_h):
        acf = _autocorrelation(_weights(s, h))
        fit[row, : len(acf)] = acf
    return _SNodeResult(full, half, fit)


def _midpoints(count: int) -> np.ndarray:
    return (np.arange(count) + 0.5) / count


def _tail_fits(h: np.ndarray, v: np.ndarray, h_max: float) -> Tuple[float, float]:
    """Tail ∫_{h_max}^∞ of (c1 log h + c2)/h², and its spread against alternative fits."""
    R = h_max

    def fit(mask, extra):
        cols = [np.log(h[mask]) / h[mask] ** 2, 1.0 / h[mask] ** 2]
        if extra:
            cols.append(1.0 / h[mask] ** 3)
        coef, *_ = np.linalg.lstsq(np.column_stack(cols), v[mask], rcond=None)
        tail = (coef[0] * (math.log(R) + 1.0) + coef[1]) / R
        if extra:
            tail += coef[2] / (2.0 * R * R)
        return tail

    upper = h >= R / 2.0
    base = fit(upper, False)
    spread = max(abs(base - fit(upper, True)), abs(base - fit(np.ones_like(upper), False)))
    return base, spread


class IntegralEstimate(NamedTuple):
    value: float
    a_grid: float
    s_grid: float
    h_cutoff: float
    h_grid: float


def entropy_integral(
    h_max: float = 200.0,
    a_nodes: int = 96,
    s_nodes: int = 32,
    h_nodes: int = 400,
    *,
    a_rule: str = "exact",
    dense_h: int = 32,
    workers: int = 1,
    tol: Optional[float] = None,
) -> IntegralEstimate:
    """(1/4)∫∫∫ local_variance_integrand dh ds da with its error budget."""
    if h_max < 50:
        raise ParameterError(f"h_max must be at least 50, got {h_max}")
    if min(a_nodes, s_nodes, h_nodes) < 16:
        raise ParameterError("a_nodes, s_nodes and h_nodes must each be at least 16")
    if a_rule not in ("exact", "nodes"):
        raise ParameterError(f"unknown a_rule {a_rule!r}")

    max_lag = int(math.ceil(h_max)) + 2
    panels = len(h_panels(0.5, h_max, dense_h)) - 1
    order = max(4, int(math.ceil(h_nodes / panels)))
    fit_h = np.linspace(h_max / 4.0, h_max, 97)

    task = partial(_s_node_task, h_max=h_max, dense_h=dense_h, order=order, max_lag=max_lag, fit_h=fit_h)
    main = fan_out(task, _midpoints(s_nodes).tolist(), workers=workers)
    half_task = partial(task, fit_h=None)
    coarse = fan_out(half_task, _midpoints(s_nodes // 2).tolist(), workers=workers)

    moments = np.mean([r.moments for r in main], axis=0)
    moments_half_order = np.mean([r.moments_half_order for r in main], axis=0)
    moments_half_s = np.mean([r.moments for r in coarse], axis=0)
    fit_acf = np.mean([r.fit_acf for r in main], axis=0)

    if a_rule == "exact":
        coeff = exact_lag_coefficients(max_lag)
        a_grid = 0.0
    else:
        coeff = node_lag_coefficients(max_lag, a_nodes)
        a_grid = 0.25 * abs(float(np.dot(coeff - node_lag_coefficients(max_lag, a_nodes // 2), moments)))

    body = 0.25 * float(np.dot(coeff, moments))
    tail, h_cutoff = _tail_fits(fit_h, 0.25 * (fit_acf @ coeff), h_max)
    estimate = IntegralEstimate(
        value=body + tail,
        a_grid=a_grid,
        s_grid=0.25 * abs(float(np.dot(coeff, moments - moments_half_s))),
        h_cutoff=h_cutoff,
        h_grid=0.25 * abs(float(np.dot(coeff, moments - moments_half_order))),
    )
    log.info("entropy integral %.6f (body %.6f, tail %.6f) over %d h panels x %d nodes",
             estimate.value, body, tail, panels, order)
    if tol is not None:
        spent = estimate.a_grid + estimate.s_grid + estimate.h_cutoff + estimate.h_grid
        if spent > tol:
            raise BudgetNotMet(f"integral budget {spent:.3e} exceeds tolerance {tol:.3e}")
    return estimate


# ---------------------------------------------------------------------------
# The constant
# ---------------------------------------------------------------------------

@dataclass
class EntropyBudget:
    a_grid: float = 0.0
    s_grid: float = 0.0
    h_cutoff: float = 0.0
    h_grid: float = 0.0
    series_k_tail: float = 0.0
    series_l_tail: float = 0.0

    @property
    def total(self) -> float:
        return math.fsum(asdict(self).values())


@dataclass
class EntropyEstimate:
    value: float
    budget: EntropyBudget
    config: Dict[str, Any] = field(default_factory=dict)
    integral: float = 0.0
    series: float = 0.0

    @property
    def total_budget(self) -> float:
        return self.budget.total

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": RecordKind.ENTROPY.value,
            "value": self.value,
            "integral": self.integral,
            "series": self.series,
            "budget": asdict(self.budget),
            "total_budget": self.total_budget,
            "config": self.config,
        }


def entropy_constant(config: Optional[EntropyConfig] = None) -> EntropyEstimate:
    cfg = config or EntropyConfig()
    integral = entropy_integral(
        cfg.h_max, cfg.a_nodes, cfg.s_nodes, cfg.h_nodes,
        a_rule=cfg.a_rule, dense_h=cfg.dense_h, workers=cfg.workers,
    )
    series = entropy_series(cfg.k_max)
    budget = EntropyBudget(
        a_grid=integral.a_grid,
        s_grid=integral.s_grid,
        h_cutoff=integral.h_cutoff,
        h_grid=integral.h_grid,
        series_k_tail=series.k_tail,
        series_l_tail=series.l_tail,
    )
    estimate = EntropyEstimate(
        value=integral.value + series.value,
        budget=budget,
        config=cfg.echo(),
        integral=integral.value,
        series=series.value,
    )
    log.info("H = %.6f ± %.2e", estimate.value, budget.total)
    if budget.total > cfg.tol:
        raise BudgetNotMet(f"entropy budget {budget.total:.3e} exceeds tolerance {cfg.tol:.3e}")
    return estimate
