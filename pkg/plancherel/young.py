"""Young diagrams.

Validation, conjugation, hook lengths, dimensions and exact Plancherel
log-probabilities, the Maya profile c(λ), the rotated boundary Φ_λ and its
deviation F_λ from the limit shape Ω.
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import EmptyDiagram, NonMonotoneRows, NonPositiveRow, ParameterError, WindowTooNarrow
from .records import RecordKind

ArrayLike = Union[float, np.ndarray]

_EXACT_LOG_FACTORIAL_MAX = 256
_LOG_FACTORIALS = [
    math.fsum(math.log(k) for k in range(2, m + 1)) for m in range(_EXACT_LOG_FACTORIAL_MAX + 1)
]


def log_factorial(n: int) -> float:
    """log n!; exact log-sums up to 256, Stirling with four corrections above."""
    if n < 0:
        raise ParameterError(f"log_factorial of negative integer {n}")
    if n <= _EXACT_LOG_FACTORIAL_MAX:
        return _LOG_FACTORIALS[n]
    x = float(n)
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv * (1 / 12 - inv2 * (1 / 360 - inv2 * (1 / 1260 - inv2 / 1680)))
    return x * math.log(x) - x + 0.5 * math.log(2 * math.pi * x) + series


@dataclass(frozen=True)
class YoungDiagram:
    rows: Tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        for r in rows:
            if r <= 0:
                raise NonPositiveRow(f"row lengths must be positive, got {list(rows)}")
        for a, b in zip(rows, rows[1:]):
            if b > a:
                raise NonMonotoneRows(f"row lengths must be weakly decreasing, got {list(rows)}")
        object.__setattr__(self, "rows", rows)

    @cached_property
    def n(self) -> int:
        return sum(self.rows)

    @property
    def length(self) -> int:
        """Number of rows, λ′₁."""
        return len(self.rows)

    @property
    def first_row(self) -> int:
        """λ₁ (0 for the empty diagram)."""
        return self.rows[0] if self.rows else 0

    @cached_property
    def conjugate_rows(self) -> Tuple[int, ...]:
        out: List[int] = []
        i = len(self.rows)
        for j in range(self.first_row):
            while i > 0 and self.rows[i - 1] <= j:
                i -= 1
            out.append(i)
        return tuple(out)

    @cached_property
    def hooks(self) -> np.ndarray:
        if not self.rows:
            return np.zeros(0, dtype=np.int64)
        conj = np.asarray(self.conjugate_rows, dtype=np.int64)
        # hook(i, j) = (λ_i - j) + (λ'_j - i) - 1 with 0-based i, j
        chunks = [r - np.arange(r, dtype=np.int64) + conj[:r] - i - 1 for i, r in enumerate(self.rows)]
        hooks = np.concatenate(chunks)
        hooks.flags.writeable = False
        return hooks

    def __repr__(self) -> str:
        return f"YoungDiagram({list(self.rows)})"


def from_rows(rows: Iterable[int]) -> YoungDiagram:
    return YoungDiagram(tuple(rows))


def conjugate(d: YoungDiagram) -> YoungDiagram:
    return YoungDiagram(d.conjugate_rows)


def partitions(n: int) -> Iterator[YoungDiagram]:
    """All λ ⊢ n in reverse lexicographic order ([n] first, [1^n] last)."""
    if n < 0:
        raise ParameterError(f"cannot partition negative integer {n}")

    def rec(remaining: int, max_part: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, max_part), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    for rows in rec(n, n):
        yield YoungDiagram(rows)


def require_cells(d: YoungDiagram, what: str) -> None:
    if d.n == 0:
        raise EmptyDiagram(f"{what} is undefined for the empty diagram")


def hook_lengths(d: YoungDiagram) -> np.ndarray:
    return d.hooks


def hook_histogram(d: YoungDiagram) -> np.ndarray:
    """h_k(λ) for k = 0..max hook (entry 0 is always 0)."""
    return np.bincount(d.hooks, minlength=d.n + 1)


def hook_count(d: YoungDiagram, k: int) -> int:
    if k < 1:
        raise ParameterError(f"hook length must be positive, got {k}")
    return int(np.count_nonzero(d.hooks == k))


def dimension(d: YoungDiagram) -> int:
    """Exact dim λ = n! / Π hooks."""
    return math.factorial(d.n) // math.prod(int(h) for h in d.hooks)


def log_dim(d: YoungDiagram) -> float:
    require_cells(d, "log_dim")
    return log_factorial(d.n) - math.fsum(np.log(d.hooks.astype(np.float64)))


def log_plancherel(d: YoungDiagram) -> float:
    require_cells(d, "log_plancherel")
    return 2.0 * log_dim(d) - log_factorial(d.n)


# ---------------------------------------------------------------------------
# Maya profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProfileWindow:
    """c_k(λ) on [lo, hi]; c_k = 1 below lo and 0 above hi."""
    lo: int
    hi: int
    bits: Tuple[int, ...]
    outside_rule: bool = True

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != self.hi - self.lo + 1:
            raise ParameterError(f"window [{self.lo}, {self.hi}] needs {self.hi - self.lo + 1} bits, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ParameterError("profile bits must be 0 or 1")
        ones_right = sum(b for k, b in zip(range(self.lo, self.hi + 1), bits) if k >= 0)
        zeros_left = sum(1 - b for k, b in zip(range(self.lo, self.hi + 1), bits) if k < 0)
        if ones_right != zeros_left:
            raise ParameterError("profile window does not encode a diagram (nonzero charge)")
        object.__setattr__(self, "bits", bits)

    def c(self, k: int) -> int:
        if k < self.lo:
            return 1
        if k > self.hi:
            return 0
        return self.bits[k - self.lo]

    def c_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        arr = np.asarray(self.bits, dtype=np.int8)
        inside = np.clip(ks - self.lo, 0, len(arr) - 1)
        return np.where(ks < self.lo, 1, np.where(ks > self.hi, 0, arr[inside])).astype(np.int8)

    @property
    def settled(self) -> bool:
        """Both ends already agree with the outside rule."""
        return self.bits[0] == 1 and self.bits[-1] == 0


def profile(d: YoungDiagram, lo: Optional[int] = None, hi: Optional[int] = None) -> ProfileWindow:
    need_lo, need_hi = -d.length - 1, d.first_row
    lo = -(d.length + 2) if lo is None else lo
    hi = d.first_row + 2 if hi is None else hi
    if lo > need_lo or hi < need_hi:
        raise WindowTooNarrow(f"window [{lo}, {hi}] must contain [{need_lo}, {need_hi}] for {d!r}")
    ones = {r - i for i, r in enumerate(d.rows, start=1)}
    bits = tuple(1 if (k in ones or k <= need_lo) else 0 for k in range(lo, hi + 1))
    return ProfileWindow(lo=lo, hi=hi, bits=bits)


def hook_count_via_profile(p: ProfileWindow, k: int) -> int:
    """h_k = Σ_i c_i (1 - c_{i-k})."""
    if k < 1:
        raise ParameterError(f"hook length must be positive, got {k}")
    if not p.settled:
        raise WindowTooNarrow(f"window [{p.lo}, {p.hi}] does not reach the constant parts of the profile")
    c = np.asarray(p.bits, dtype=np.int64)
    shifted = np.ones_like(c)
    if k < len(c):
        shifted[k:] = c[:-k]
    return int(np.sum(c * (1 - shifted)))


def diagram_from_profile(p: ProfileWindow) -> YoungDiagram:
    ones = [k for k, b in zip(range(p.hi, p.lo - 1, -1), reversed(p.bits)) if b]
    rows = [k + i for i, k in enumerate(ones, start=1)]
    return YoungDiagram(tuple(r for r in rows if r > 0))


# ---------------------------------------------------------------------------
# Limit shape and deviation
# ---------------------------------------------------------------------------

def _scalar_or_array(t: ArrayLike, out: np.ndarray) -> ArrayLike:
    return float(out) if np.ndim(t) == 0 else out


def limit_shape(t: ArrayLike) -> ArrayLike:
    """Ω(t) = (2/π)(t·arcsin(t/2) + √(4 − t²)) on |t| ≤ 2, |t| beyond."""
    x = np.asarray(t, dtype=np.float64)
    inner = np.clip(x, -2.0, 2.0)
    curve = (2 / np.pi) * (inner * np.arcsin(inner / 2) + np.sqrt(np.maximum(4.0 - inner * inner, 0.0)))
    out = np.where(np.abs(x) < 2.0, curve, np.abs(x))
    return _scalar_or_array(t, out)


@dataclass(frozen=True, eq=False)
class DeviationFunction:
    """Φ_λ and F_λ(t) = Φ_λ(t) − √n Ω(t/√n), evaluated by binary search on integer knots."""
    diagram: YoungDiagram

    @property
    def n(self) -> int:
        return self.diagram.n

    @cached_property
    def knots(self) -> np.ndarray:
        return np.arange(-self.diagram.length, self.diagram.first_row + 1, dtype=np.float64)

    @cached_property
    def slopes(self) -> np.ndarray:
        """Slope of Φ_λ on (k, k+1) for k = knots[0]-1 .. knots[-1]."""
        ks = np.arange(-self.diagram.length - 1, self.diagram.first_row + 1)
        return 1 - 2 * profile(self.diagram).c_array(ks).astype(np.int64)

    @cached_property
    def values(self) -> np.ndarray:
        inner = self.slopes[1:-1]
        return float(self.diagram.length) + np.concatenate(([0.0], np.cumsum(inner, dtype=np.float64)))

    @cached_property
    def minima(self) -> np.ndarray:
        change = np.diff(self.slopes)
        return self.knots[change > 0]

    @cached_property
    def maxima(self) -> np.ndarray:
        change = np.diff(self.slopes)
        return self.knots[change < 0]

    @property
    def support(self) -> Tuple[float, float]:
        """F_λ vanishes outside this interval."""
        edge = 2.0 * math.sqrt(self.n)
        return -max(float(self.diagram.length), edge), max(float(self.diagram.first_row), edge)

    def phi(self, t: ArrayLike) -> ArrayLike:
        x = np.asarray(t, dtype=np.float64)
        inside = np.interp(x, self.knots, self.values)
        out = np.where((x < self.knots[0]) | (x > self.knots[-1]), np.abs(x), inside)
        return _scalar_or_array(t, out)

    def __call__(self, t: ArrayLike) -> ArrayLike:
        require_cells(self.diagram, "deviation")
        x = np.asarray(t, dtype=np.float64)
        root = math.sqrt(self.n)
        out = np.asarray(self.phi(x)) - root * np.asarray(limit_shape(x / root))
        return _scalar_or_array(t, out)


@lru_cache(maxsize=256)
def deviation_function(d: YoungDiagram) -> DeviationFunction:
    return DeviationFunction(d)


def phi(d: YoungDiagram, t: ArrayLike) -> ArrayLike:
    return deviation_function(d).phi(t)


def deviation(d: YoungDiagram, t: ArrayLike) -> ArrayLike:
    return deviation_function(d)(t)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def to_record(d: YoungDiagram) -> Dict[str, Any]:
    return {"kind": RecordKind.DIAGRAM.value, "rows": list(d.rows)}


def from_record(rec: Dict[str, Any]) -> YoungDiagram:
    if "rows" not in rec:
        raise ParameterError("diagram record has no 'rows' field")
    return YoungDiagram(tuple(rec["rows"]))


def diagrams_from_records(records: Sequence[Dict[str, Any]]) -> List[YoungDiagram]:
    return [from_record(r) for r in records if r.get("kind", RecordKind.DIAGRAM.value) == RecordKind.DIAGRAM.value]
