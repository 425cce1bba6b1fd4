from __future__ import annotations
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..errors import NotAProbability, ParameterError

MAX_PATTERN = 8


@dataclass(frozen=True)
class PatternVector:
    """Distinct offsets m⃗ placed at base x; the event is c_{x+m_i} = 1 for all i."""
    offsets: Tuple[int, ...]
    base: int = 0

    def __post_init__(self):
        offsets = tuple(int(m) for m in self.offsets)
        if len(set(offsets)) != len(offsets):
            raise ParameterError(f"pattern offsets must be distinct, got {list(offsets)}")
        object.__setattr__(self, "offsets", offsets)

    @property
    def points(self) -> Tuple[int, ...]:
        return tuple(self.base + m for m in self.offsets)

    @property
    def span(self) -> int:
        """|m⃗| = max − min of the offsets."""
        return max(self.offsets) - min(self.offsets) if self.offsets else 0

    def shifted(self, base: int) -> "PatternVector":
        return PatternVector(self.offsets, base)


def det_expectation(kernel: Callable[[int, int], float], pattern: PatternVector, tol: float = 1e-9) -> float:
    """E c_{x+m⃗} = det[K(x+m_i, x+m_j)] for a determinantal process with kernel K."""
    r = len(pattern.offsets)
    if r > MAX_PATTERN:
        raise ParameterError(f"patterns longer than {MAX_PATTERN} are not supported, got {r}")
    if r == 0:
        return 1.0
    pts = pattern.points
    matrix = np.array([[kernel(a, b) for b in pts] for a in pts], dtype=np.float64)
    value = float(np.linalg.det(matrix))
    if value < -tol or value > 1.0 + tol:
        raise NotAProbability(f"determinant {value:.6g} for points {list(pts)} is not a probability")
    return min(1.0, max(0.0, value))
