from __future__ import annotations
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Sequence, TypeVar

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def fan_out(fn: Callable[[T], R], items: Iterable[T], workers: int = 1, chunksize: int = 1) -> List[R]:
    """Map ``fn`` over ``items`` and return results in item order.

    ``fn`` must be picklable (a module-level function or a ``functools.partial``
    of one) when ``workers > 1``. Results never depend on ``workers``: every
    item carries its own random stream, and reductions happen afterwards on the
    ordered list.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, chunksize)))


@dataclass
class Suite:
    """Named steps executed one after another; results keyed by step name."""
    name: str
    steps: Dict[str, Callable[[], Any]] = field(default_factory=dict)

    def add(self, key: str, fn: Callable[[], Any]):
        self.steps[key] = fn
        return self

    def keys(self) -> Sequence[str]:
        return list(self.steps)

    def run(self) -> Dict[str, Any]:
        results: Dict[str, Any] = {}
        for key, fn in self.steps.items():
            log.info("suite %s: running %s", self.name, key)
            results[key] = fn()
        return results
