from __future__ import annotations
from typing import Any, Dict


class PlancherelError(Exception):
    """Base error. Carries the process exit code used by the CLI."""
    exit_code: int = 4

    def to_record(self) -> Dict[str, Any]:
        return {
            "kind": "error",
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class UsageError(PlancherelError):
    exit_code = 2


class ParameterError(PlancherelError, ValueError):
    exit_code = 3


class ComputationError(PlancherelError, ArithmeticError):
    exit_code = 4


# young
class NonMonotoneRows(ParameterError):
    pass


class NonPositiveRow(ParameterError):
    pass


class EmptyDiagram(ParameterError):
    pass


class WindowTooNarrow(ParameterError):
    pass


# sampler
class NTooLarge(ParameterError):
    pass


# kernels
class DiagonalRequested(ParameterError):
    pass


class TooCloseToEdge(ParameterError):
    pass


class OutsideBulk(ParameterError):
    pass


class ToleranceUnreachable(ComputationError):
    pass


class NotAProbability(ComputationError):
    pass


# entropy / variational
class BudgetNotMet(ComputationError):
    pass
