"""Command registry.

Every CLI verb is a function taking a pydantic-validated argument model and a
:class:`RunContext`, registered with ``@command(ArgsModel, description=...)``.
A command returns the list of records it wants written.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import EntropyConfig, RunSettings
from .entropy import entropy_constant
from .experiments import (
    ExperimentReport,
    PatternFrequencySpec,
    default_decay_pairs,
    run_besselmain,
    run_boo_correlations,
    run_correlation_decay,
    run_edge_statistics,
    run_entropy_convergence,
    run_hook_frequencies,
    run_limit_shape,
    run_pattern_frequency,
    run_sampler_fit,
    run_sine_limit_rate,
    run_vk_decomposition,
    run_vk_on_diagrams,
)
from .kernels import BesselKernelParams, SineKernelParams, bessel_kernel, bessel_kernel_diag, sine_kernel
from .kernels.determinantal import MAX_PATTERN
from .records import RecordKind
from .sampler import sample_header, sample_many
from .storage import read_records
from .workflow import Suite
from .young import diagrams_from_records, to_record

log = logging.getLogger(__name__)

Record = Dict[str, Any]


@dataclass
class RunContext:
    settings: RunSettings = field(default_factory=RunSettings)

    @property
    def workers(self) -> int:
        return self.settings.workers

    def seed(self, given: Optional[int]) -> int:
        return self.settings.seed if given is None else given


class Args(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SeededArgs(Args):
    seed: Optional[int] = Field(None, ge=0, description="Base seed (default: PLANCHEREL_SEED or 0)")


class Command:
    def __init__(self, name: str, func: Callable[[BaseModel, RunContext], List[Record]],
                 args_model: type[BaseModel], description: str):
        self.name = name
        self.func = func
        self.args_model = args_model
        self.description = description

    def schema(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "parameters": self.args_model.model_json_schema(),
        }

    def __call__(self, raw_args: Dict[str, Any], ctx: Optional[RunContext] = None) -> List[Record]:
        args = self.args_model(**raw_args)
        return self.func(args, ctx or RunContext())


REGISTRY: Dict[str, Command] = {}


def command(name: str, args_model: type[BaseModel], description: str):
    """Register a pydantic-typed function as a CLI command under ``name``.

    Example:
        class SampleArgs(Args):
            n: int

        @command("sample", SampleArgs, description="Draw diagrams")
        def sample(args: SampleArgs, ctx: RunContext):
            ...
    """
    def decorator(func: Callable[[BaseModel, RunContext], List[Record]]):
        cmd = Command(name, func, args_model, description)
        REGISTRY[name] = cmd
        return cmd
    return decorator


def get_command(name: str) -> Command:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"Unknown command: {name}") from None


# ----------------------------------------------------------------------------
# sample
# ----------------------------------------------------------------------------
class SampleArgs(SeededArgs):
    n: Optional[int] = Field(None, ge=1, description="Number of cells (Plancherel measure)")
    theta: Optional[float] = Field(None, gt=0, description="Poissonization parameter; cell count ~ Poisson(theta^2)")
    count: int = Field(1, ge=0, description="Number of diagrams")
    experiment: str = Field("sample", description="Experiment id used to derive per-sample streams")

    @model_validator(mode="after")
    def _one_measure(self):
        if self.n is None and self.theta is None:
            raise ValueError("give --n or --theta")
        if self.n is not None and self.theta is not None:
            raise ValueError("give only one of --n and --theta")
        return self


@command("sample", SampleArgs, description="Draw diagrams from the Plancherel or poissonized Plancherel measure.")
def sample_cmd(args: SampleArgs, ctx: RunContext) -> List[Record]:
    seed = ctx.seed(args.seed)
    diagrams = sample_many(args.n, args.count, seed, args.experiment, ctx.workers, theta=args.theta)
    header = sample_header(seed, args.count, n=args.n, theta=args.theta, experiment_id=args.experiment)
    return [header, *(to_record(d) for d in diagrams)]


# ----------------------------------------------------------------------------
# entropy
# ----------------------------------------------------------------------------
class EntropyArgs(Args):
    h_max: float = Field(200.0, ge=50, description="Cut-off of the window-length integral")
    a_nodes: int = Field(96, ge=16, description="Nodes in the sine-process parameter (a-rule 'nodes')")
    s_nodes: int = Field(32, ge=16, description="Midpoint nodes in the lattice offset")
    h_nodes: int = Field(400, ge=16, description="Minimum number of window-length nodes")
    k_max: int = Field(200, ge=10, description="Terms of the double series summed explicitly")
    tol: float = Field(5e-3, gt=0, description="Largest acceptable total error budget")
    a_rule: Literal["exact", "nodes"] = Field("exact", description="Closed-form or node-based a-integration")
    dense_h: int = Field(32, ge=1, description="Unit-width window panels up to this length")


@command("entropy", EntropyArgs, description="Compute the entropy constant H with an itemized error budget.")
def entropy_cmd(args: EntropyArgs, ctx: RunContext) -> List[Record]:
    cfg = EntropyConfig(workers=ctx.workers, **args.model_dump())
    return [entropy_constant(cfg).to_record()]


# ----------------------------------------------------------------------------
# kernel
# ----------------------------------------------------------------------------
class BesselArgs(Args):
    theta: float = Field(..., gt=0, description="Kernel parameter theta (eta = theta^2)")
    x: int = Field(..., description="First lattice point")
    y: int = Field(..., description="Second lattice point (x == y gives the diagonal)")
    tol: float = Field(1e-10, gt=0, le=1e-6, description="Relative evaluation tolerance")


@command("kernel bessel", BesselArgs, description="Evaluate the discrete Bessel kernel J(x, y; theta^2).")
def kernel_bessel_cmd(args: BesselArgs, ctx: RunContext) -> List[Record]:
    p = BesselKernelParams(theta=args.theta, tol=args.tol)
    if args.x == args.y:
        value, bound = bessel_kernel_diag(p, args.x, with_bound=True)
    else:
        value, bound = bessel_kernel(p, args.x, args.y, with_bound=True)
    return [{"kind": RecordKind.KERNEL.value, "kernel": "bessel", **args.model_dump(), "value": value, "bound": bound}]


class SineArgs(Args):
    a: float = Field(..., gt=-2, lt=2, description="Bulk position a in (-2, 2)")
    k: int = Field(..., description="Lag")


@command("kernel sine", SineArgs, description="Evaluate the discrete sine kernel S(k, a).")
def kernel_sine_cmd(args: SineArgs, ctx: RunContext) -> List[Record]:
    value = sine_kernel(SineKernelParams(a=args.a), args.k)
    return [{"kind": RecordKind.KERNEL.value, "kernel": "sine", **args.model_dump(), "value": value, "bound": 0.0}]


# ----------------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------------
class VerifyVkArgs(SeededArgs):
    n: int = Field(1000, ge=1, description="Number of cells")
    count: int = Field(50, ge=1, description="Number of samples")
    quad_tol: Optional[float] = Field(None, gt=0, description="Relative seminorm tolerance (default by n)")
    h0: float = Field(50.0, gt=1, description="Split point of the seminorm tail")
    input: Optional[str] = Field(None, description="Read diagram records from this path ('-' for stdin) instead of sampling")


@command("verify vk", VerifyVkArgs, description="Variational-formula decomposition and residual per sample.")
def verify_vk_cmd(args: VerifyVkArgs, ctx: RunContext) -> List[Record]:
    if args.input is not None:
        diagrams = diagrams_from_records(read_records(args.input))
        return run_vk_on_diagrams(diagrams, args.quad_tol, args.h0, ctx.workers).to_records()
    return run_vk_decomposition(args.n, args.count, ctx.seed(args.seed), args.quad_tol, args.h0, ctx.workers).to_records()


class VerifyHooksArgs(SeededArgs):
    n: int = Field(10_000, ge=400, description="Number of cells")
    count: int = Field(100, ge=1, description="Number of samples")
    ks: List[int] = Field(default_factory=lambda: [1, 2, 3], description="Hook lengths")


@command("verify hooks", VerifyHooksArgs, description="Hook-length frequencies h_k/sqrt(n) against their limits.")
def verify_hooks_cmd(args: VerifyHooksArgs, ctx: RunContext) -> List[Record]:
    return run_hook_frequencies(args.ks, args.n, args.count, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyPatternsArgs(SeededArgs):
    n: int = Field(10_000, ge=400, description="Number of cells")
    count: int = Field(100, ge=1, description="Number of samples")
    offsets: List[int] = Field(default_factory=lambda: [0, 1], description="Pattern offsets")
    nodes: List[float] = Field(default_factory=lambda: [-2.0, 2.0], description="Weight-function nodes in [-2, 2]")
    values: List[float] = Field(default_factory=lambda: [1.0, 1.0], description="Weight-function values at the nodes")


@command("verify patterns", VerifyPatternsArgs, description="Local pattern ergodic averages against sine-process integrals.")
def verify_patterns_cmd(args: VerifyPatternsArgs, ctx: RunContext) -> List[Record]:
    spec = PatternFrequencySpec(tuple(args.offsets), tuple(args.nodes), tuple(args.values))
    return run_pattern_frequency(spec, args.n, args.count, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyBooArgs(SeededArgs):
    theta: float = Field(30.0, ge=5, description="Poissonization parameter")
    lo: int = Field(-20, description="Window start")
    hi: int = Field(20, description="Window end")
    max_order: int = Field(2, ge=1, le=MAX_PATTERN, description=(
        f"Largest correlation order, at most {MAX_PATTERN}; every subset of the window up to this size is checked, "
        "so the work grows like C(hi - lo + 1, max_order)"))
    count: int = Field(20_000, ge=1, description="Number of samples")


@command("verify boo", VerifyBooArgs, description="Poissonized correlations against Bessel-kernel determinants.")
def verify_boo_cmd(args: VerifyBooArgs, ctx: RunContext) -> List[Record]:
    return run_boo_correlations(args.theta, (args.lo, args.hi), args.max_order, args.count,
                                ctx.seed(args.seed), ctx.workers).to_records()


class VerifyDecayArgs(SeededArgs):
    n: int = Field(10_000, ge=100, description="Number of cells")
    count: int = Field(400, ge=2, description="Number of samples")
    max_separation: int = Field(200, ge=1, description="Largest separation |x - y|")


@command("verify decay", VerifyDecayArgs, description="Covariance decay |Cov(c_x, c_y)|(|x-y|+1) in the bulk.")
def verify_decay_cmd(args: VerifyDecayArgs, ctx: RunContext) -> List[Record]:
    pairs = default_decay_pairs(args.n, args.max_separation)
    return run_correlation_decay(args.n, args.count, pairs, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyEdgeArgs(SeededArgs):
    n: int = Field(10_000, ge=400, description="Number of cells")
    count: int = Field(1000, ge=1, description="Number of samples")
    deltas: List[float] = Field(default_factory=lambda: [0.2, 0.3, 0.5], description="Exponents delta in (1/6, 1/2]")


@command("verify edge", VerifyEdgeArgs, description="Frequencies of first row or column beyond 2 sqrt(n) + n^delta.")
def verify_edge_cmd(args: VerifyEdgeArgs, ctx: RunContext) -> List[Record]:
    return run_edge_statistics(args.n, args.count, args.deltas, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyShapeArgs(SeededArgs):
    n: int = Field(10_000, ge=400, description="Number of cells")
    count: int = Field(20, ge=1, description="Number of samples")


@command("verify shape", VerifyShapeArgs, description="Sup-deviation of the rescaled boundary from the limit shape.")
def verify_shape_cmd(args: VerifyShapeArgs, ctx: RunContext) -> List[Record]:
    return run_limit_shape(args.n, args.count, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyConvergenceArgs(SeededArgs):
    ns: List[int] = Field(default_factory=lambda: [1000, 10_000, 100_000], description="Diagram sizes")
    count: int = Field(50, ge=10, description="Samples per size")


@command("verify convergence", VerifyConvergenceArgs, description="Mean and spread of -log Pl / sqrt(n) per size.")
def verify_convergence_cmd(args: VerifyConvergenceArgs, ctx: RunContext) -> List[Record]:
    return run_entropy_convergence(args.ns, args.count, ctx.seed(args.seed), ctx.workers).to_records()


class VerifyFitArgs(SeededArgs):
    n: int = Field(5, ge=1, le=12, description="Number of cells")
    count: int = Field(100_000, ge=1, description="Number of samples")


@command("verify fit", VerifyFitArgs, description="Chi-square of sampled shapes against the exact distribution.")
def verify_fit_cmd(args: VerifyFitArgs, ctx: RunContext) -> List[Record]:
    return run_sampler_fit(args.n, args.count, ctx.seed(args.seed), ctx.workers).to_records()


class VerifySineArgs(Args):
    ns: List[int] = Field(default_factory=lambda: [400, 2500, 10_000], description="Sizes n (theta = sqrt(n))")
    max_lag: int = Field(5, ge=0, description="Largest lag l")


@command("verify sine", VerifySineArgs, description="Rate of the Bessel-to-sine kernel limit.")
def verify_sine_cmd(args: VerifySineArgs, ctx: RunContext) -> List[Record]:
    return run_sine_limit_rate(args.ns, args.max_lag).to_records()


class VerifyBesselMainArgs(Args):
    n: int = Field(400, ge=1, description="Size n (theta = sqrt(n))")


@command("verify besselmain", VerifyBesselMainArgs, description="Empirical constant of the bulk density estimate.")
def verify_besselmain_cmd(args: VerifyBesselMainArgs, ctx: RunContext) -> List[Record]:
    return run_besselmain(args.n).to_records()


class SuiteArgs(SeededArgs):
    pass


def desk_suite(seed: int, workers: int) -> Suite:
    suite = Suite("desk")
    suite.add("fit", lambda: [run_sampler_fit(n, 100_000, seed, workers) for n in (3, 4, 5, 6)])
    suite.add("sine", lambda: [run_sine_limit_rate([400, 2500, 10_000])])
    suite.add("besselmain", lambda: [run_besselmain(400)])
    suite.add("boo", lambda: [run_boo_correlations(30.0, (-20, 20), 2, 20_000, seed, workers)])
    suite.add("hooks", lambda: [run_hook_frequencies([1, 2, 3], 10_000, 100, seed, workers)])
    spec = PatternFrequencySpec((0, 1))
    suite.add("patterns", lambda: [run_pattern_frequency(spec, 10_000, 100, seed, workers)])
    suite.add("decay", lambda: [run_correlation_decay(10_000, 400, default_decay_pairs(10_000), seed, workers)])
    suite.add("edge", lambda: [run_edge_statistics(10_000, 1000, [0.2, 0.3, 0.5], seed, workers)])
    suite.add("shape", lambda: [run_limit_shape(n, 20, seed, workers) for n in (1000, 10_000)])
    suite.add("vk", lambda: [run_vk_decomposition(n, 50, seed, None, 50.0, workers) for n in (1000, 10_000)])
    suite.add("convergence", lambda: [run_entropy_convergence([100_000], 50, seed, workers)])
    suite.add("entropy", lambda: [entropy_constant(EntropyConfig(workers=workers))])
    return suite


@command("verify", SuiteArgs, description="Run the desk-scale verification suite.")
def verify_suite_cmd(args: SuiteArgs, ctx: RunContext) -> List[Record]:
    results = desk_suite(ctx.seed(args.seed), ctx.workers).run()
    out: List[Record] = []
    for key, items in results.items():
        for item in items:
            out.extend(item.to_records() if isinstance(item, ExperimentReport) else [item.to_record()])
    return out


# ----------------------------------------------------------------------------
# report-merge
# ----------------------------------------------------------------------------
class MergeArgs(Args):
    inputs: List[str] = Field(..., min_length=1, description="Record files to merge ('-' for stdin)")


@command("report-merge", MergeArgs, description="Concatenate record streams into one stream or CSV table.")
def report_merge_cmd(args: MergeArgs, ctx: RunContext) -> List[Record]:
    out: List[Record] = []
    for path in args.inputs:
        out.extend(read_records(path))
    return out
