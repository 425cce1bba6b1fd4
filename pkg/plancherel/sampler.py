"""Plancherel and poissonized Plancherel samplers with deterministic streams."""
from __future__ import annotations
import bisect
import hashlib
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import NTooLarge, ParameterError
from .records import SampleHeader
from .workflow import fan_out
from .young import YoungDiagram, dimension, partitions

log = logging.getLogger(__name__)

EXACT_MAX_N = 12
_MASK64 = (1 << 64) - 1
STREAM_POLICY = "stream_id = blake2b-64(experiment_id, index); PCG64(SeedSequence(seed, spawn_key=(stream_id,)))"


def derive_stream_id(experiment_id: str, index: int) -> int:
    digest = hashlib.blake2b(f"{experiment_id}:{index}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class SeededRng:
    """A numpy Generator pinned to (seed, stream_id)."""

    def __init__(self, seed: int, stream_id: int = 0):
        self._seed = int(seed) & _MASK64
        self._stream_id = int(stream_id) & _MASK64
        seq = np.random.SeedSequence(self._seed, spawn_key=(self._stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream_id(self) -> int:
        return self._stream_id

    @classmethod
    def for_task(cls, seed: int, experiment_id: str, index: int) -> "SeededRng":
        return cls(seed, derive_stream_id(experiment_id, index))

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def poisson(self, mean: float) -> int:
        return int(self.generator.poisson(mean))

    def __repr__(self) -> str:
        return f"SeededRng(seed={self._seed}, stream_id={self._stream_id:#018x})"


def rsk_shape(values) -> YoungDiagram:
    """Shape of the Schensted insertion tableau of a sequence of distinct values."""
    rows: List[List[int]] = []
    for v in values:
        for row in rows:
            pos = bisect.bisect_left(row, v)
            if pos == len(row):
                row.append(v)
                break
            row[pos], v = v, row[pos]
        else:
            rows.append([v])
    return YoungDiagram(tuple(len(r) for r in rows))


def sample_plancherel(n: int, rng: SeededRng) -> YoungDiagram:
    if n < 1:
        raise ParameterError(f"sample_plancherel needs n >= 1, got {n}")
    return rsk_shape(rng.permutation(n).tolist())


def sample_poissonized(theta: float, rng: SeededRng) -> YoungDiagram:
    """N ~ Poisson(θ²), then λ ~ Pl⁽ᴺ⁾; N = 0 gives the empty diagram."""
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    count = rng.poisson(theta * theta)
    if count == 0:
        return YoungDiagram(())
    return sample_plancherel(count, rng)


@dataclass(frozen=True)
class ExactDistribution:
    n: int
    entries: Tuple[Tuple[YoungDiagram, Fraction], ...]

    @property
    def diagrams(self) -> List[YoungDiagram]:
        return [d for d, _ in self.entries]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([float(p) for _, p in self.entries])

    def probability_of(self, d: YoungDiagram) -> Fraction:
        for shape, p in self.entries:
            if shape == d:
                return p
        return Fraction(0)

    def total(self) -> Fraction:
        return sum((p for _, p in self.entries), Fraction(0))


def exact_distribution(n: int) -> ExactDistribution:
    if n < 1:
        raise ParameterError(f"exact_distribution needs n >= 1, got {n}")
    if n > EXACT_MAX_N:
        raise NTooLarge(f"exact enumeration is limited to n <= {EXACT_MAX_N}, got {n}")
    fact = math.factorial(n)
    entries = tuple((d, Fraction(dimension(d) ** 2, fact)) for d in partitions(n))
    return ExactDistribution(n=n, entries=entries)


def _draw(index: int, *, n: Optional[int], theta: Optional[float], seed: int, experiment_id: str) -> YoungDiagram:
    rng = SeededRng.for_task(seed, experiment_id, index)
    if theta is not None:
        return sample_poissonized(theta, rng)
    return sample_plancherel(n, rng)


def sample_many(
    n: Optional[int],
    count: int,
    seed: int,
    experiment_id: str = "sample",
    workers: int = 1,
    theta: Optional[float] = None,
) -> List[YoungDiagram]:
    """``count`` independent diagrams, one derived stream per index.

    Exactly one of ``n`` (fixed size) and ``theta`` (poissonized) is used;
    ``theta`` wins when both are given.
    """
    if theta is None and (n is None or n < 1):
        raise ParameterError("sample_many needs n >= 1 or theta > 0")
    if count < 0:
        raise ParameterError(f"count must be nonnegative, got {count}")
    log.debug("sampling %d diagrams (n=%s theta=%s seed=%d, %s)", count, n, theta, seed, experiment_id)
    task = partial(_draw, n=n, theta=theta, seed=seed, experiment_id=experiment_id)
    return fan_out(task, range(count), workers=workers, chunksize=max(1, count // (4 * max(1, workers))))


def sample_header(
    seed: int,
    count: int,
    n: Optional[int] = None,
    theta: Optional[float] = None,
    experiment_id: str = "sample",
) -> Dict[str, Any]:
    params: Dict[str, Any] = {"count": count}
    if theta is not None:
        params["theta"] = theta
    else:
        params["n"] = n
    return SampleHeader(seed=seed, stream_policy=STREAM_POLICY, parameters=params, experiment=experiment_id).to_record()
