from __future__ import annotations
import argparse
import logging
import sys
import types
from typing import Any, Dict, List, Literal, Optional, Sequence, Union, get_args, get_origin

import numpy as np
from pydantic import BaseModel, ValidationError

from .commands import REGISTRY, Record, RunContext
from .config import RunSettings
from .errors import ComputationError, ParameterError, PlancherelError, UsageError
from .storage import JSONLRunLogger, dumps, open_output, statistics_of, write_csv, write_records

log = logging.getLogger("plancherel")

_COMMON = ("output", "format", "workers", "log_level", "run_log")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _unwrap_optional(ann: Any) -> Any:
    if get_origin(ann) in (Union, types.UnionType):
        rest = [a for a in get_args(ann) if a is not type(None)]
        if len(rest) == 1:
            return rest[0]
    return ann


def _add_model_flags(parser: argparse.ArgumentParser, model: type[BaseModel]) -> None:
    """One ``--flag-name`` per model field; unset flags fall through to the model defaults."""
    for name, info in model.model_fields.items():
        ann = _unwrap_optional(info.annotation)
        kwargs: Dict[str, Any] = {"dest": name, "default": argparse.SUPPRESS, "help": info.description}
        if get_origin(ann) in (list, List):
            (inner,) = get_args(ann)
            kwargs.update(nargs="+", type=inner)
        elif get_origin(ann) is Literal:
            choices = get_args(ann)
            kwargs.update(choices=choices, type=type(choices[0]))
        elif ann is bool:
            kwargs["action"] = argparse.BooleanOptionalAction
        else:
            kwargs["type"] = ann
        if info.is_required():
            kwargs["required"] = True
        parser.add_argument("--" + name.replace("_", "-"), **kwargs)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("output and execution")
    g.add_argument("--output", default=argparse.SUPPRESS, help="Write records here instead of stdout")
    g.add_argument("--format", choices=("records", "csv"), default=argparse.SUPPRESS,
                   help="JSON lines (default) or a CSV table of the statistic records")
    g.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="Worker processes (PLANCHEREL_WORKERS)")
    g.add_argument("--log-level", dest="log_level", default=argparse.SUPPRESS,
                   choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="Diagnostics level on stderr")
    g.add_argument("--run-log", dest="run_log", default=argparse.SUPPRESS,
                   help="Append a provenance line per run to this JSONL file (PLANCHEREL_RUN_LOG)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="plancherel", description="Plancherel-measure entropy toolkit.")
    verbs = parser.add_subparsers(dest="verb", parser_class=_Parser, required=True)
    groups: Dict[str, argparse._SubParsersAction] = {}
    leaves: Dict[str, argparse.ArgumentParser] = {}

    for name in sorted(REGISTRY, key=lambda k: (len(k.split()), k)):
        cmd = REGISTRY[name]
        head, _, target = name.partition(" ")
        if not target:
            p = verbs.add_parser(head, parents=[common], help=cmd.description, description=cmd.description)
            _add_model_flags(p, cmd.args_model)
            leaves[head] = p
            continue
        if head not in groups:
            owner = leaves.get(head) or verbs.add_parser(head, help=f"{head} subcommands")
            groups[head] = owner.add_subparsers(dest="target", parser_class=_Parser, required=head not in leaves)
        p = groups[head].add_parser(target, parents=[common], help=cmd.description, description=cmd.description)
        _add_model_flags(p, cmd.args_model)
    return parser


def _settings(ns: Dict[str, Any]) -> RunSettings:
    settings = RunSettings()
    if "workers" in ns:
        if ns["workers"] < 1:
            raise ParameterError(f"--workers must be at least 1, got {ns['workers']}")
        settings.workers = ns["workers"]
    if "log_level" in ns:
        settings.log_level = ns["log_level"]
    if "run_log" in ns:
        settings.run_log = ns["run_log"]
    if "format" in ns:
        settings.output_format = ns["format"]
    return settings


def _emit(records: List[Record], settings: RunSettings, output: Optional[str]) -> int:
    with open_output(output) as stream:
        if settings.output_format == "csv":
            return write_csv(stream, statistics_of(records))
        return write_records(stream, records)


def _run(argv: Optional[Sequence[str]], state: Dict[str, Any]) -> int:
    ns = vars(build_parser().parse_args(argv))
    name = ns.pop("verb") + (f" {ns.pop('target')}" if ns.get("target") else "")
    ns.pop("target", None)
    state["command"] = name
    settings = state["settings"] = _settings(ns)
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    output = ns.get("output")
    raw = {k: v for k, v in ns.items() if k not in _COMMON}
    state["args"] = raw
    cmd = REGISTRY[name]
    try:
        args = cmd.args_model(**raw)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(map(str, err['loc'])) or name}: {err['msg']}" for err in e.errors())
        raise ParameterError(problems) from e

    ctx = RunContext(settings=settings)
    state["args"] = args.model_dump()
    if "seed" in type(args).model_fields:
        state["seed"] = ctx.seed(getattr(args, "seed"))
    log.info("running %s with %s (workers=%d)", name, state["args"], settings.workers)
    records = cmd.func(args, ctx)
    state["records"] = _emit(records, settings, output)
    log.info("%s wrote %d records", name, state["records"])
    return 0


def _log_run(state: Dict[str, Any], exit_code: int) -> None:
    settings = state.get("settings")
    if settings is None or not settings.run_log:
        return
    JSONLRunLogger(settings.run_log).log({
        "command": state.get("command"),
        "args": state.get("args"),
        "seed": state.get("seed"),
        "workers": settings.workers,
        "records": state.get("records", 0),
        "exit_code": exit_code,
    })


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit code (0 ok, 2 usage, 3 parameter, 4 computation)."""
    state: Dict[str, Any] = {}
    try:
        code = _run(argv, state)
        _log_run(state, code)
        return code
    except SystemExit as e:
        # --help and friends
        return int(e.code or 0)
    except PlancherelError as e:
        err = e
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
        # numpy / scipy domain errors; PlancherelError subclasses were handled above
        err = ComputationError(f"{type(e).__name__}: {e}")
    except OSError as e:
        err = ParameterError(f"{type(e).__name__}: {e}")
    sys.stderr.write(dumps(err.to_record()) + "\n")
    _log_run(state, err.exit_code)
    return err.exit_code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
