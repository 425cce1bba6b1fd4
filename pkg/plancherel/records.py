from __future__ import annotations
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Dict, Any, Optional, Union

CSV_COLUMNS = ("experiment", "n_or_theta", "statistic", "estimate", "stderr", "count", "seed")


class RecordKind(str, Enum):
    DIAGRAM = "diagram"
    HEADER = "header"
    STATISTIC = "statistic"
    ENTROPY = "entropy"
    VK = "vk"
    KERNEL = "kernel"
    ERROR = "error"


@dataclass
class StatRecord:
    experiment: str
    n_or_theta: Union[int, float]
    statistic: str
    estimate: float
    stderr: float
    count: int
    seed: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        out = {"kind": RecordKind.STATISTIC.value, **asdict(self)}
        if not self.meta:
            out.pop("meta")
        return out

    def csv_row(self) -> Dict[str, Any]:
        return {c: getattr(self, c) for c in CSV_COLUMNS}

    @classmethod
    def from_record(cls, rec: Dict[str, Any]) -> "StatRecord":
        return cls(**{k: rec[k] for k in CSV_COLUMNS}, meta=dict(rec.get("meta", {})))


@dataclass
class SampleHeader:
    """Leading record of a sample dump: enough to regenerate every diagram."""
    seed: int
    stream_policy: str
    parameters: Dict[str, Any]
    experiment: Optional[str] = None
    environment: Optional[Dict[str, Any]] = None

    def to_record(self) -> Dict[str, Any]:
        out = {"kind": RecordKind.HEADER.value, **asdict(self)}
        if self.environment is None:
            out.pop("environment")
        return out
