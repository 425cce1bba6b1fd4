from .config import EntropyConfig, QuadratureConfig, RunSettings
from .errors import PlancherelError, UsageError, ParameterError, ComputationError
from .records import RecordKind, StatRecord, SampleHeader
from .young import (
    YoungDiagram,
    from_rows,
    conjugate,
    hook_lengths,
    hook_count,
    log_dim,
    log_plancherel,
    profile,
    deviation_function,
    limit_shape,
)
from .sampler import SeededRng, sample_plancherel, sample_poissonized, sample_many, exact_distribution
from .kernels import get_kernel, bessel_j, bessel_kernel, sine_kernel, det_expectation, PatternVector
from .entropy import hook_series_weight, local_variance_integrand, entropy_constant
from .variational import seminorm_half, vk_decompose
from .commands import Command, command, REGISTRY

__all__ = [
    "EntropyConfig",
    "QuadratureConfig",
    "RunSettings",
    "PlancherelError",
    "UsageError",
    "ParameterError",
    "ComputationError",
    "RecordKind",
    "StatRecord",
    "SampleHeader",
    "YoungDiagram",
    "from_rows",
    "conjugate",
    "hook_lengths",
    "hook_count",
    "log_dim",
    "log_plancherel",
    "profile",
    "deviation_function",
    "limit_shape",
    "SeededRng",
    "sample_plancherel",
    "sample_poissonized",
    "sample_many",
    "exact_distribution",
    "get_kernel",
    "bessel_j",
    "bessel_kernel",
    "sine_kernel",
    "det_expectation",
    "PatternVector",
    "hook_series_weight",
    "local_variance_integrand",
    "entropy_constant",
    "seminorm_half",
    "vk_decompose",
    "Command",
    "command",
    "REGISTRY",
]
