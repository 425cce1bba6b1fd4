from __future__ import annotations
import csv, json, os, sys
from contextlib import contextmanager
from typing import Any, Dict, IO, Iterable, Iterator, List
from datetime import datetime, timezone

from .records import CSV_COLUMNS, RecordKind, StatRecord


class JSONLRunLogger:
    """Append-only provenance log: one timestamped line per run."""

    def __init__(self, path: str = "runs.jsonl"):
        self.path = path
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)

    def log(self, record: Dict[str, Any]) -> None:
        record = {"ts": datetime.now(timezone.utc).isoformat(), **record}
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False, default=_jsonable) + "\n")


def _jsonable(obj: Any) -> Any:
    # numpy scalars and arrays sneak into records from the numeric modules
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, default=_jsonable)


def write_records(stream: IO[str], records: Iterable[Dict[str, Any]]) -> int:
    count = 0
    for rec in records:
        stream.write(dumps(rec) + "\n")
        count += 1
    stream.flush()
    return count


def write_csv(stream: IO[str], stats: Iterable[StatRecord]) -> int:
    writer = csv.DictWriter(stream, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    count = 0
    for s in stats:
        writer.writerow(s.csv_row())
        count += 1
    stream.flush()
    return count


@contextmanager
def open_input(path: str) -> Iterator[IO[str]]:
    if path == "-":
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as f:
            yield f


@contextmanager
def open_output(path: str | None) -> Iterator[IO[str]]:
    if path in (None, "-"):
        yield sys.stdout
    else:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yield f


def iter_records(stream: IO[str]) -> Iterator[Dict[str, Any]]:
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as e:
            from .errors import ParameterError
            raise ParameterError(f"line {lineno}: not a JSON record ({e.msg})") from e


def read_records(path: str) -> List[Dict[str, Any]]:
    with open_input(path) as f:
        return list(iter_records(f))


def statistics_of(records: Iterable[Dict[str, Any]]) -> List[StatRecord]:
    return [StatRecord.from_record(r) for r in records if r.get("kind") == RecordKind.STATISTIC.value]
