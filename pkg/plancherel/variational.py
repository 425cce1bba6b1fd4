"""Terms of the variational formula for −log Pl(λ)/√n on a concrete diagram.

    −log Pl(λ)/√n = hook term + ||F_λ||_{1/2} / (8√n) + arccosh term − ε_n

The residual stored by :func:`vk_decompose` is lhs minus the three terms, so
ε_n = −residual.
"""
from __future__ import annotations
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, trapezoid
from scipy.signal import fftconvolve
from scipy.special import polygamma

from .config import QuadratureConfig
from .entropy import hook_series_weights
from .errors import BudgetNotMet, ParameterError
from .records import RecordKind
from .young import YoungDiagram, require_cells, deviation_function, hook_histogram, log_plancherel

log = logging.getLogger(__name__)

_GAUSS_ORDER = 8


def hook_term(d: YoungDiagram) -> float:
    """(1/√n) Σ_k h_k(λ) w(k), k running over 1..n."""
    require_cells(d, "hook_term")
    hist = hook_histogram(d)
    ks = np.nonzero(hist)[0]
    weights, _ = hook_series_weights(ks)
    return math.fsum(hist[ks] * weights) / math.sqrt(d.n)


# ---------------------------------------------------------------------------
# ||F||_{1/2} = 2 ∫_0^∞ G(h)/h² dh,  G(h) = ∫ (F(t+h) − F(t))² dt
# ---------------------------------------------------------------------------

def _sample_window(d: YoungDiagram) -> Tuple[int, int]:
    lo, hi = deviation_function(d).support
    return int(math.floor(lo)), int(math.ceil(hi))


def _derivative_energy(d: YoungDiagram, t0: int, t1: int) -> float:
    """∫ F'(t)² dt, exactly piecewise: Φ' is ±1 on unit intervals."""
    dev = deviation_function(d)
    root = math.sqrt(d.n)
    ks = np.arange(t0, t1, dtype=np.float64)
    slopes = np.diff(np.asarray(dev.phi(np.arange(t0, t1 + 1, dtype=np.float64))))
    x, w = np.polynomial.legendre.leggauss(_GAUSS_ORDER)
    t = ks[:, None] + 0.5 * (x[None, :] + 1.0)
    g = (2.0 / math.pi) * np.arcsin(np.clip(t / (2.0 * root), -1.0, 1.0))
    return float(np.sum(0.5 * w[None, :] * (slopes[:, None] - g) ** 2))


@dataclass(frozen=True, eq=False)
class SeminormProfile:
    """D(h) = G(h)/h² on the grid h = l/q, l = 0..width·q (D(0) = ∫F'²)."""
    h: np.ndarray
    values: np.ndarray
    c0: float
    width: float
    subdivisions: int

    def integral(self) -> float:
        return 2.0 * (trapezoid(self.values, self.h) + 2.0 * self.c0 / self.width)

    def split(self, h0: float) -> Tuple[float, float]:
        total = self.integral()
        if h0 >= self.width:
            tail = 4.0 * self.c0 / h0
            return total - tail, tail
        cum = cumulative_trapezoid(self.values, self.h, initial=0.0)
        local = 2.0 * float(np.interp(h0, self.h, cum))
        return local, total - local


def seminorm_profile(d: YoungDiagram, subdivisions: int) -> SeminormProfile:
    require_cells(d, "seminorm")
    if subdivisions < 1:
        raise ParameterError(f"subdivisions must be positive, got {subdivisions}")
    q = int(subdivisions)
    t0, t1 = _sample_window(d)
    width = t1 - t0
    f = np.asarray(deviation_function(d)(t0 + np.arange(width * q + 1) / q))
    m = len(f)

    corr = fftconvolve(f, f[::-1])[m - 1:] / q
    c0 = float(np.dot(f, f)) / q
    g = 2.0 * (c0 - corr)
    # small lags by direct differences; the autocorrelation form cancels there
    for lag in range(1, min(2 * q, m - 1) + 1):
        diff = f[lag:] - f[:-lag]
        tails = float(np.dot(f[:lag], f[:lag]) + np.dot(f[-lag:], f[-lag:]))
        g[lag] = (float(np.dot(diff, diff)) + tails) / q

    h = np.arange(m) / q
    values = np.empty(m)
    values[1:] = g[1:] / (h[1:] * h[1:])
    values[0] = _derivative_energy(d, t0, t1)
    return SeminormProfile(h=h, values=values, c0=c0, width=float(width), subdivisions=q)


class _Certified:
    def __init__(self, coarse: SeminormProfile, fine: SeminormProfile, value: float, error: float, ratio: float):
        self.coarse, self.fine, self.value, self.error, self.ratio = coarse, fine, value, error, ratio

    def extrapolate(self, coarse: float, fine: float) -> float:
        return fine + (fine - coarse) / (self.ratio - 1.0)


# below this the doubling sequence is not yet in its asymptotic regime
_MIN_RATIO = 2.0


def _observed_ratio(a: float, b: float, c: float) -> float:
    """Error reduction per doubling from three successive integrals (Aitken)."""
    step = c - b
    if step == 0.0:
        return 0.0
    return (b - a) / step


def _certify(d: YoungDiagram, quad_tol: Optional[float], cfg: Optional[QuadratureConfig]) -> _Certified:
    """Double q until the extrapolated integral is certified to ``tol`` relative.

    The discretization error decays like log q / q², so the reduction ratio is
    measured from the last three grids instead of assuming the q⁻² value 4.
    """
    cfg = cfg or QuadratureConfig(quad_tol=quad_tol)
    tol = quad_tol if quad_tol is not None else cfg.tolerance_for(d.n)
    q = cfg.start_subdivisions
    profiles = [seminorm_profile(d, q)]
    integrals = [profiles[0].integral()]
    rel = math.inf
    for _ in range(cfg.max_refinements):
        q *= 2
        profiles = [profiles[-1], seminorm_profile(d, q)]
        integrals.append(profiles[-1].integral())
        if len(integrals) < 3:
            continue
        a, b, c = integrals[-3:]
        if a == b == c:
            return _Certified(profiles[-2], profiles[-1], c, 0.0, math.inf)
        ratio = _observed_ratio(a, b, c)
        if ratio >= _MIN_RATIO:
            error = abs(c - b) / (ratio - 1.0)
            value = c + (c - b) / (ratio - 1.0)
        else:
            error = abs(c - b) + abs(b - a)
            value = c
        rel = error / max(abs(value), 1e-300)
        if ratio >= _MIN_RATIO and rel <= tol:
            log.debug("seminorm n=%d converged at q=%d: %.6g ± %.1e (ratio %.2f)", d.n, q, value, error, ratio)
            return _Certified(profiles[-2], profiles[-1], value, error, ratio)
    raise BudgetNotMet(f"seminorm for n={d.n} reached relative error {rel:.2e} > {tol:.1e} at q={q}")


def seminorm_half(d: YoungDiagram, quad_tol: Optional[float] = None, config: Optional[QuadratureConfig] = None) -> float:
    """∫∫ ((F(t) − F(s))/(t − s))² dt ds, certified to quad_tol relative."""
    return _certify(d, quad_tol, config).value


def seminorm_split(d: YoungDiagram, h0: float, quad_tol: Optional[float] = None,
                   config: Optional[QuadratureConfig] = None) -> Tuple[float, float]:
    """(local, tail) = the h ≤ h0 and h > h0 parts of seminorm_half."""
    if not h0 > 0:
        raise ParameterError(f"h0 must be positive, got {h0}")
    cert = _certify(d, quad_tol, config)
    lc, tc = cert.coarse.split(h0)
    lf, tf = cert.fine.split(h0)
    if cert.ratio == math.inf:
        return lf, tf
    return cert.extrapolate(lc, lf), cert.extrapolate(tc, tf)


# ---------------------------------------------------------------------------
# Edge term
# ---------------------------------------------------------------------------

def arccosh_tail_term(d: YoungDiagram) -> float:
    """(1/√n) ∫_{|t| ≥ 2√n} F_λ(t) arccosh(|t|/2√n) dt."""
    require_cells(d, "arccosh_tail_term")
    dev = deviation_function(d)
    root = math.sqrt(d.n)
    edge = 2.0 * root

    def integrand(t: float) -> float:
        return float(dev(t)) * math.acosh(abs(t) / edge)

    total = 0.0
    for reach, sign in ((float(d.first_row), 1.0), (float(d.length), -1.0)):
        if reach <= edge:
            continue
        cuts = [edge] + [float(k) for k in range(int(math.floor(edge)) + 1, int(reach))] + [reach]
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            lo, hi = (a, b) if sign > 0 else (-b, -a)
            value, _ = quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=100)
            total += value
    return total / root


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------

@dataclass
class VKDecomposition:
    n: int
    lhs: float
    hook_term: float
    seminorm_term: float
    arccosh_term: float
    residual: float
    seminorm_error: float = 0.0
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def epsilon(self) -> float:
        return -self.residual

    def to_record(self) -> Dict[str, Any]:
        out = {"kind": RecordKind.VK.value, **asdict(self)}
        if not self.meta:
            out.pop("meta")
        return out


def vk_decompose(d: YoungDiagram, quad_tol: Optional[float] = None,
                 config: Optional[QuadratureConfig] = None) -> VKDecomposition:
    require_cells(d, "vk_decompose")
    root = math.sqrt(d.n)
    lhs = -log_plancherel(d) / root
    hooks = hook_term(d)
    cert = _certify(d, quad_tol, config)
    semi = cert.value / (8.0 * root)
    edge = arccosh_tail_term(d)
    residual = ((lhs - hooks) - semi) - edge
    return VKDecomposition(
        n=d.n,
        lhs=lhs,
        hook_term=hooks,
        seminorm_term=semi,
        arccosh_term=edge,
        residual=residual,
        seminorm_error=cert.error / (8.0 * root),
    )


# ---------------------------------------------------------------------------
# Discrete majorant of the seminorm tail
# ---------------------------------------------------------------------------

@dataclass
class DiscreteTail:
    value: float
    in_regular_set: bool
    cut_radius: float
    h0: float
    L: float
    delta: float
    K: float

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def discretized_seminorm_tail(d: YoungDiagram, h0: float, L: float, delta: float, K: float = 1.0) -> DiscreteTail:
    """(4/√n) Σ_{l > h0−1} Σ_k ((F^(L,δ)(k+l) − F^(L,δ)(k))/l)².

    F^(L,δ) is F_λ at integers, zeroed for |k| > 2√n − L n^δ. ``in_regular_set``
    records whether λ₁ and λ′₁ are both at most 2√n + K n^δ.
    """
    require_cells(d, "discretized_seminorm_tail")
    if not 0.0 < delta < 0.25:
        raise ParameterError(f"delta must lie in (0, 1/4), got {delta}")
    if not h0 > 1.0:
        raise ParameterError(f"h0 must exceed 1, got {h0}")
    root = math.sqrt(d.n)
    cut = 2.0 * root - L * d.n ** delta
    t0, t1 = _sample_window(d)
    ks = np.arange(t0, t1 + 1)
    f = np.where(np.abs(ks) <= cut, np.asarray(deviation_function(d)(ks.astype(np.float64))), 0.0)
    m = len(f)
    corr = np.correlate(f, f, "full")[m - 1:] if m <= 4096 else fftconvolve(f, f[::-1])[m - 1:]
    c0 = float(np.dot(f, f))
    first = int(math.floor(h0 - 1.0)) + 1
    lags = np.arange(max(first, 1), m)
    body = float(np.sum(2.0 * (c0 - corr[lags]) / (lags * lags.astype(np.float64)))) if len(lags) else 0.0
    # beyond the window every shifted copy is disjoint: Σ_k (·)² = 2 Σ F², Σ_{l ≥ m'} 1/l² = ψ′(m')
    start = max(first, m)
    tail = 2.0 * c0 * float(polygamma(1, start))
    bound = 2.0 * root + K * d.n ** delta
    return DiscreteTail(
        value=4.0 * (body + tail) / root,
        in_regular_set=bool(d.first_row <= bound and d.length <= bound),
        cut_radius=cut,
        h0=h0,
        L=L,
        delta=delta,
        K=K,
    )
