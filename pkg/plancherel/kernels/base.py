from __future__ import annotations
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np


class DeterminantalKernel(ABC):
    """A correlation kernel K on ℤ; __call__ covers the diagonal too."""
    name: str = "kernel"

    @abstractmethod
    def off_diagonal(self, x: int, y: int) -> float:
        ...

    @abstractmethod
    def density(self, x: int) -> float:
        ...

    def __call__(self, x: int, y: int) -> float:
        if x == y:
            return self.density(x)
        return self.off_diagonal(x, y)

    def matrix(self, points: Sequence[int]) -> np.ndarray:
        pts = [int(p) for p in points]
        return np.array([[self(a, b) for b in pts] for a in pts], dtype=np.float64)

    def describe(self) -> dict:
        return {"kernel": self.name}
