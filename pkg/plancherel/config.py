from __future__ import annotations
from dataclasses import dataclass, field, asdict
from typing import Optional, Literal, Dict, Any
import os

ARule = Literal["exact", "nodes"]
OutputFormat = Literal["records", "csv"]


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


@dataclass
class EntropyConfig:
    h_max: float = 200.0
    a_nodes: int = 96
    s_nodes: int = 32
    h_nodes: int = 400
    k_max: int = 200
    tol: float = 5e-3
    a_rule: ARule = "exact"
    # unit-width h panels aligned to kinks up to here, geometric beyond
    dense_h: int = 32
    workers: int = 1

    def echo(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class QuadratureConfig:
    quad_tol: Optional[float] = None
    start_subdivisions: int = 4
    max_refinements: int = 8

    def tolerance_for(self, n: int) -> float:
        if self.quad_tol is not None:
            return self.quad_tol
        return default_quad_tol(n)


def default_quad_tol(n: int) -> float:
    return 1e-4 if n <= 10_000 else 1e-3


@dataclass
class RunSettings:
    seed: int = field(default_factory=lambda: _env_int("PLANCHEREL_SEED", 0))
    workers: int = field(default_factory=lambda: _env_int("PLANCHEREL_WORKERS", 1))
    run_log: Optional[str] = field(default_factory=lambda: os.getenv("PLANCHEREL_RUN_LOG") or None)
    log_level: str = field(default_factory=lambda: os.getenv("PLANCHEREL_LOG_LEVEL", "WARNING"))
    output_format: OutputFormat = "records"
