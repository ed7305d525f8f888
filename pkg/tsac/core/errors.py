"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class TsacError(Exception):
    """Base class for every error raised by tsac."""

    exit_code: int = 1


class NumericalFailure(TsacError):
    """Non-finite values or a linear-algebra routine that did not converge."""

    exit_code = 4


class NotStabilizable(TsacError):
    """The Riccati iteration diverged or did not converge.

    Sampling treats this as a rejection signal: the model admits no
    finite-cost stabilizing policy (within the iteration budget).
    """

    exit_code = 4


class DimensionMismatch(TsacError, ValueError):
    exit_code = 2


class InvalidConfig(TsacError, ValueError):
    """A library object was constructed with out-of-range parameters."""

    exit_code = 2


class SamplingExhausted(TsacError):
    """No member of the stabilizable set was reachable from the estimate."""

    exit_code = 4


class OptimisticSearchFailed(TsacError):
    exit_code = 4


class EmptyWindow(TsacError, ValueError):
    exit_code = 2


class InsufficientData(TsacError, ValueError):
    exit_code = 2


class Diverged(TsacError):
    """State norm crossed the overflow guard."""

    exit_code = 4

    def __init__(self, step: int, norm: float):
        super().__init__(f"state norm {norm:.3e} exceeded guard at step {step}")
        self.step = step
        self.norm = norm


class ConfigError(TsacError):
    """Bad configuration file or field."""

    exit_code = 2

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")
        self.field = field
        self.line = line


class OutputError(TsacError, OSError):
    exit_code = 3
