"""Monte-Carlo experiments over Plancherel and poissonized Plancherel samples.

Every runner draws sample i from the stream derived from (seed, experiment id,
i), computes a per-sample statistic in a module-level task (so it can run in
worker processes), and reduces the ordered results. Reports therefore depend
only on (experiment, parameters, seed), never on the worker count.
"""
from __future__ import annotations
import itertools
import logging
import math
import platform
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy
from scipy import stats
from scipy.integrate import quad

from .config import QuadratureConfig
from .errors import ComputationError, ParameterError
from .kernels import BesselKernel, BesselKernelParams, PatternVector, SineKernel, SineKernelParams, det_expectation
from .kernels.determinantal import MAX_PATTERN
from .kernels.bessel import besselmain_scan, sine_limit_discrepancy
from .records import RecordKind, SampleHeader, StatRecord
from .sampler import STREAM_POLICY, SeededRng, exact_distribution, sample_plancherel, sample_poissonized
from .variational import seminorm_split, vk_decompose
from .workflow import fan_out
from .young import YoungDiagram, deviation_function, hook_histogram, log_plancherel, profile

log = logging.getLogger(__name__)


def environment() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


@dataclass
class ExperimentReport:
    experiment: str
    parameters: Dict[str, Any]
    seed: int
    statistics: List[StatRecord] = field(default_factory=list)
    records: List[Dict[str, Any]] = field(default_factory=list)
    environment: Dict[str, str] = field(default_factory=environment)

    def add(self, n_or_theta, statistic: str, estimate: float, stderr: float, count: int, **meta) -> StatRecord:
        rec = StatRecord(
            experiment=self.experiment,
            n_or_theta=n_or_theta,
            statistic=statistic,
            estimate=float(estimate),
            stderr=float(stderr),
            count=int(count),
            seed=self.seed,
            meta=meta,
        )
        self.statistics.append(rec)
        return rec

    def get(self, statistic: str, n_or_theta=None) -> StatRecord:
        for s in self.statistics:
            if s.statistic == statistic and (n_or_theta is None or s.n_or_theta == n_or_theta):
                return s
        raise KeyError(statistic)

    def header(self) -> Dict[str, Any]:
        return SampleHeader(
            seed=self.seed,
            stream_policy=STREAM_POLICY,
            parameters=self.parameters,
            experiment=self.experiment,
            environment=self.environment,
        ).to_record()

    def to_records(self) -> List[Dict[str, Any]]:
        return [self.header(), *self.records, *(s.to_record() for s in self.statistics)]


@dataclass(frozen=True)
class PatternFrequencySpec:
    """Pattern m⃗ and a weight f on [−2, 2] given by linear interpolation of (nodes, values)."""
    offsets: Tuple[int, ...]
    nodes: Tuple[float, ...] = (-2.0, 2.0)
    values: Tuple[float, ...] = (1.0, 1.0)

    def __post_init__(self):
        PatternVector(self.offsets)
        nodes = np.asarray(self.nodes, dtype=np.float64)
        if len(nodes) < 2 or len(nodes) != len(self.values):
            raise ParameterError("weight table needs at least two nodes and one value per node")
        if np.any(np.diff(nodes) <= 0) or nodes[0] < -2.0 or nodes[-1] > 2.0:
            raise ParameterError("weight nodes must be strictly increasing within [-2, 2]")

    @property
    def pattern(self) -> PatternVector:
        return PatternVector(self.offsets)

    def weight(self, a):
        return np.interp(a, self.nodes, self.values, left=0.0, right=0.0)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------

def summarize(values: Sequence[float]) -> Tuple[float, float, float]:
    """(mean, standard error, sample std) with numpy's pairwise summation."""
    arr = np.asarray(values, dtype=np.float64)
    count = len(arr)
    if count == 0:
        return math.nan, math.nan, math.nan
    mean = float(np.mean(arr))
    std = float(np.std(arr, ddof=1)) if count > 1 else 0.0
    return mean, std / math.sqrt(count), std


def z_score(estimate: float, target: float, stderr: float, count: int) -> float:
    return (estimate - target) / max(stderr, 0.5 / max(count, 1))


def bernoulli_stderr(p: float, count: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / count) if count else math.nan


def _per_sample(index: int, *, stat: Callable, n: Optional[int], theta: Optional[float], seed: int,
                experiment_id: str):
    rng = SeededRng.for_task(seed, experiment_id, index)
    d = sample_poissonized(theta, rng) if theta is not None else sample_plancherel(n, rng)
    return stat(d)


def _collect(stat: Callable, count: int, seed: int, experiment_id: str, workers: int,
             n: Optional[int] = None, theta: Optional[float] = None) -> List[Any]:
    task = partial(_per_sample, stat=stat, n=n, theta=theta, seed=seed, experiment_id=experiment_id)
    return fan_out(task, range(count), workers=workers, chunksize=max(1, count // (4 * max(1, workers))))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


# ---------------------------------------------------------------------------
# Per-sample statistics (module level so they pickle)
# ---------------------------------------------------------------------------

def _neg_log_pl(d: YoungDiagram) -> float:
    return -log_plancherel(d) / math.sqrt(d.n)


def _hooks_over_root(ks: Tuple[int, ...], d: YoungDiagram) -> Tuple[np.ndarray, int]:
    hist = hook_histogram(d)
    padded = np.zeros(max(ks) + 1, dtype=np.int64)
    top = min(len(hist), len(padded))
    padded[:top] = hist[:top]
    return padded[list(ks)] / math.sqrt(d.n), int(hist.sum())


def _pattern_average(spec: PatternFrequencySpec, d: YoungDiagram) -> float:
    root = math.sqrt(d.n)
    ks = np.arange(int(math.ceil(-2 * root)), int(math.floor(2 * root)) + 1)
    p = profile(d)
    occupied = np.ones(len(ks), dtype=np.int64)
    for m in spec.offsets:
        occupied *= p.c_array(ks + m)
    return float(np.sum(spec.weight(ks / root) * occupied)) / root


def _window_bits(lo: int, hi: int, d: YoungDiagram) -> np.ndarray:
    lo_w = min(lo, -(d.length + 2))
    hi_w = max(hi, d.first_row + 2)
    return profile(d, lo_w, hi_w).c_array(np.arange(lo, hi + 1))


def _edge_lengths(d: YoungDiagram) -> Tuple[int, int]:
    return d.first_row, d.length


def _sup_deviation(d: YoungDiagram) -> float:
    dev = deviation_function(d)
    lo, hi = dev.support
    t = np.arange(math.floor(lo), math.ceil(hi) + 1) + 0.5
    return float(np.max(np.abs(dev(t)))) / math.sqrt(d.n)


def _shape(d: YoungDiagram) -> Tuple[int, ...]:
    return d.rows


def _vk_task(quad_tol: Optional[float], h0: float, d: YoungDiagram) -> Dict[str, Any]:
    """A vk record with ``status`` ok, empty (n = 0 has no decomposition) or failed."""
    if d.n == 0:
        return {"kind": RecordKind.VK.value, "n": 0, "status": "empty"}
    cfg = QuadratureConfig(quad_tol=quad_tol)
    try:
        vk = vk_decompose(d, config=cfg)
        _, tail = seminorm_split(d, h0, config=cfg)
    except ComputationError as e:
        log.warning("vk decomposition failed for n=%d: %s", d.n, e)
        return {"kind": RecordKind.VK.value, "n": d.n, "status": "failed",
                "error": type(e).__name__, "message": str(e)}
    rec = vk.to_record()
    rec["status"] = "ok"
    rec["seminorm_tail"] = tail
    rec["first_row"], rec["first_column"] = d.first_row, d.length
    return rec


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def run_entropy_convergence(ns: Sequence[int], count: int, seed: int, workers: int = 1) -> ExperimentReport:
    _require(all(n >= 100 for n in ns), "entropy convergence needs every n >= 100")
    _require(count >= 10, "entropy convergence needs count >= 10")
    report = ExperimentReport("entropy-convergence", {"ns": list(ns), "count": count}, seed)
    bound = 2 * math.pi / math.sqrt(6) + 1
    for n in ns:
        values = _collect(_neg_log_pl, count, seed, f"entropy-convergence/n={n}", workers, n=n)
        mean, se, std = summarize(values)
        report.add(n, "neg_log_pl_over_sqrt_n", mean, se, count, std=std,
                   min=float(np.min(values)), max=float(np.max(values)), range_bound=bound)
        log.info("n=%d: -log Pl/sqrt(n) = %.5f ± %.5f", n, mean, se)
    return report


def hook_frequency_target(k: int) -> float:
    return 32.0 * k * k / ((4.0 * k * k - 1.0) * math.pi ** 2)


def run_hook_frequencies(ks: Sequence[int], n: int, count: int, seed: int, workers: int = 1) -> ExperimentReport:
    _require(n >= 400, "hook frequencies need n >= 400")
    _require(all(k >= 1 for k in ks), "hook lengths must be positive")
    ks = tuple(int(k) for k in ks)
    report = ExperimentReport("hooks", {"n": n, "ks": list(ks), "count": count}, seed)
    results = _collect(partial(_hooks_over_root, ks), count, seed, "hooks", workers, n=n)
    table = np.array([r[0] for r in results])
    cells = np.array([r[1] for r in results])
    for j, k in enumerate(ks):
        mean, se, std = summarize(table[:, j])
        target = hook_frequency_target(k)
        report.add(n, f"h_{k}/sqrt(n)", mean, se, count, target=target, z=z_score(mean, target, se, count))
    report.add(n, "hook_total_equals_n", float(np.mean(cells == n)), 0.0, count)
    return report


def pattern_target(spec: PatternFrequencySpec) -> float:
    """∫_{−2}^{2} f(a) · E_S(a) c_m⃗ da."""
    pattern = spec.pattern

    def integrand(a: float) -> float:
        return float(spec.weight(a)) * det_expectation(SineKernel(SineKernelParams(a=a)), pattern)

    interior = [x for x in spec.nodes if -2.0 < x < 2.0]
    value, _ = quad(integrand, -2.0, 2.0, points=interior or None, epsabs=1e-10, limit=200)
    return value


def run_pattern_frequency(spec: PatternFrequencySpec, n: int, count: int, seed: int, workers: int = 1) -> ExperimentReport:
    _require(n >= 400, "pattern frequencies need n >= 400")
    report = ExperimentReport(
        "patterns",
        {"n": n, "count": count, "offsets": list(spec.offsets), "nodes": list(spec.nodes), "values": list(spec.values)},
        seed,
    )
    values = _collect(partial(_pattern_average, spec), count, seed, "patterns", workers, n=n)
    mean, se, std = summarize(values)
    target = pattern_target(spec)
    report.add(n, "pattern_average", mean, se, count, target=target, z=z_score(mean, target, se, count))
    return report


def run_boo_correlations(theta: float, window: Tuple[int, int], max_order: int, count: int, seed: int,
                         workers: int = 1, tol: float = 1e-10) -> ExperimentReport:
    lo, hi = int(window[0]), int(window[1])
    reach = 2 * theta + 5 * theta ** (1 / 3)
    _require(theta >= 5, "BOO check needs theta >= 5")
    _require(lo <= hi and max(abs(lo), abs(hi)) <= reach, f"window must lie within |x| <= {reach:.1f}")
    _require(1 <= max_order <= MAX_PATTERN, f"max_order must lie in 1..{MAX_PATTERN}")
    report = ExperimentReport(
        "boo", {"theta": theta, "window": [lo, hi], "max_order": max_order, "count": count}, seed
    )
    bits = np.array(_collect(partial(_window_bits, lo, hi), count, seed, "boo", workers, theta=theta))
    kernel = BesselKernel(BesselKernelParams(theta=theta, tol=tol))
    points = list(range(lo, hi + 1))
    zs: List[float] = []
    for r in range(1, max_order + 1):
        for combo in itertools.combinations(range(len(points)), r):
            occupied = np.prod(bits[:, list(combo)], axis=1)
            p = float(np.mean(occupied))
            se = bernoulli_stderr(p, count)
            pattern = PatternVector(tuple(points[c] for c in combo))
            target = det_expectation(kernel, pattern)
            z = z_score(p, target, se, count)
            zs.append(z)
            report.add(theta, f"rho_{r}{list(pattern.offsets)}", p, se, count, target=target, z=z)
    abs_z = np.abs(zs)
    report.add(theta, "fraction_within_2se", float(np.mean(abs_z <= 2.0)), 0.0, len(zs))
    report.add(theta, "fraction_within_3se", float(np.mean(abs_z <= 3.0)), 0.0, len(zs))
    report.add(theta, "max_abs_z", float(np.max(abs_z)), 0.0, len(zs))
    return report


def default_decay_pairs(n: int, max_separation: int = 200) -> List[Tuple[int, int]]:
    start = -min(max_separation // 2, int(0.9 * math.sqrt(n)))
    return [(start, start + s) for s in range(max_separation + 1)]


def run_correlation_decay(n: int, count: int, pairs: Sequence[Tuple[int, int]], seed: int,
                          workers: int = 1, split_at: int = 50) -> ExperimentReport:
    bulk = 1.8 * math.sqrt(n)
    _require(all(abs(x) <= bulk and abs(y) <= bulk for x, y in pairs), f"pairs must lie within |x| <= {bulk:.1f}")
    xs = sorted({p for pair in pairs for p in pair})
    lo, hi = xs[0], xs[-1]
    report = ExperimentReport("decay", {"n": n, "count": count, "pairs": [list(p) for p in pairs]}, seed)
    bits = np.array(_collect(partial(_window_bits, lo, hi), count, seed, "decay", workers, n=n), dtype=np.float64)
    centered = bits - bits.mean(axis=0)
    near, far = 0.0, 0.0
    for x, y in pairs:
        prod = centered[:, x - lo] * centered[:, y - lo]
        cov, se, _ = summarize(prod)
        sep = abs(x - y)
        scaled = abs(cov) * (sep + 1)
        report.add(n, f"cov[{x},{y}]", cov, se, count, separation=sep, scaled=scaled)
        if sep == 0:
            continue
        if sep <= split_at:
            near = max(near, scaled)
        else:
            far = max(far, scaled)
    report.add(n, "C_hat", max(near, far), 0.0, count)
    report.add(n, f"C_hat_sep<={split_at}", near, 0.0, count)
    report.add(n, f"C_hat_sep>{split_at}", far, 0.0, count)
    return report


def run_edge_statistics(n: int, count: int, deltas: Sequence[float], seed: int, workers: int = 1) -> ExperimentReport:
    _require(n >= 400, "edge statistics need n >= 400")
    _require(all(1 / 6 < d <= 0.5 for d in deltas), "deltas must lie in (1/6, 1/2]")
    report = ExperimentReport("edge", {"n": n, "count": count, "deltas": list(deltas)}, seed)
    edges = np.array(_collect(_edge_lengths, count, seed, "edge", workers, n=n))
    for delta in sorted(deltas):
        bar = 2 * math.sqrt(n) + n ** delta
        hit = (edges[:, 0] > bar) | (edges[:, 1] > bar)
        p = float(np.mean(hit))
        report.add(n, f"exceed[delta={delta:g}]", p, bernoulli_stderr(p, count), count, threshold=bar)
    return report


def run_limit_shape(n: int, count: int, seed: int, workers: int = 1) -> ExperimentReport:
    _require(n >= 400, "limit shape needs n >= 400")
    report = ExperimentReport("shape", {"n": n, "count": count}, seed)
    sups = _collect(_sup_deviation, count, seed, "shape", workers, n=n)
    mean, se, _ = summarize(sups)
    report.add(n, "sup_abs_F_over_sqrt_n", mean, se, count, max=float(np.max(sups)))
    return report


def _vk_summary(report: ExperimentReport, recs: List[Dict[str, Any]], key, h0: float) -> None:
    for i, rec in enumerate(recs):
        rec["meta"] = {"index": i}
    report.records.extend(recs)
    ok = [r for r in recs if r["status"] == "ok"]
    total = len(recs)
    report.add(key, "ok_count", len(ok), 0.0, total)
    report.add(key, "empty_count", sum(r["status"] == "empty" for r in recs), 0.0, total)
    report.add(key, "failed_count", sum(r["status"] == "failed" for r in recs), 0.0, total)
    if not ok:
        return
    residual = np.array([r["residual"] for r in ok])
    arccosh = np.abs([r["arccosh_term"] for r in ok])
    tails = np.array([r["seminorm_tail"] / math.sqrt(r["n"]) for r in ok])
    q1, median, q3 = np.percentile(residual, [25, 50, 75])
    count = len(ok)
    report.add(key, "median_abs_residual", float(np.median(np.abs(residual))), 0.0, count)
    report.add(key, "residual_median", float(median), 0.0, count)
    report.add(key, "residual_iqr", float(q3 - q1), 0.0, count)
    report.add(key, "mean_abs_arccosh_term", *summarize(arccosh)[:2], count)
    report.add(key, f"mean_seminorm_tail_over_sqrt_n[h0={h0:g}]", *summarize(tails)[:2], count)


def run_vk_decomposition(n: int, count: int, seed: int, quad_tol: Optional[float] = None, h0: float = 50.0,
                         workers: int = 1) -> ExperimentReport:
    _require(h0 > 0, f"h0 must be positive, got {h0}")
    report = ExperimentReport("vk", {"n": n, "count": count, "quad_tol": quad_tol, "h0": h0}, seed)
    recs = _collect(partial(_vk_task, quad_tol, h0), count, seed, "vk", workers, n=n)
    _vk_summary(report, recs, n, h0)
    return report


def run_vk_on_diagrams(diagrams: Sequence[YoungDiagram], quad_tol: Optional[float] = None,
                       h0: float = 50.0, workers: int = 1) -> ExperimentReport:
    """The vk decomposition on supplied diagrams (e.g. a sample dump read back in).

    Empty diagrams (poissonized dumps contain them) and samples whose
    quadrature budget fails are kept as status records and counted.
    """
    _require(h0 > 0, f"h0 must be positive, got {h0}")
    report = ExperimentReport("vk-input", {"count": len(diagrams), "quad_tol": quad_tol, "h0": h0}, seed=0)
    recs = fan_out(partial(_vk_task, quad_tol, h0), diagrams, workers=workers)
    _vk_summary(report, recs, 0, h0)
    return report


def run_sampler_fit(n: int, count: int, seed: int, workers: int = 1) -> ExperimentReport:
    dist = exact_distribution(n)
    report = ExperimentReport("sampler-fit", {"n": n, "count": count}, seed)
    shapes = _collect(_shape, count, seed, "sampler-fit", workers, n=n)
    index = {d.rows: i for i, d in enumerate(dist.diagrams)}
    observed = np.bincount([index[s] for s in shapes], minlength=len(index))
    expected = dist.probabilities * count
    result = stats.chisquare(observed, expected)
    report.add(n, "chi_square", float(result.statistic), 0.0, count, dof=len(index) - 1, pvalue=float(result.pvalue))
    return report


def run_sine_limit_rate(ns: Sequence[int], max_lag: int = 5, tol: float = 1e-10) -> ExperimentReport:
    report = ExperimentReport("sine-limit", {"ns": list(ns), "max_lag": max_lag}, seed=0)
    disc = []
    for n in ns:
        value = sine_limit_discrepancy(n, max_lag, tol)
        disc.append(value)
        report.add(n, "max_discrepancy", value, 0.0, 1)
    slope = float(np.polyfit(np.log(ns), np.log(disc), 1)[0]) if len(ns) >= 2 else math.nan
    report.add(0, "log_log_slope", slope, 0.0, len(ns))
    return report


def run_besselmain(n: int, tol: float = 1e-10) -> ExperimentReport:
    report = ExperimentReport("besselmain", {"n": n}, seed=0)
    scan = besselmain_scan(n, tol)
    report.add(n, "C_hat", scan.constant, 0.0, scan.points, at=scan.at)
    return report
