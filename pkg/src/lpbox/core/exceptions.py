"""
Error hierarchy shared by the analysis library, the services and the CLI.

Each class carries the process exit code `lpbox.app` maps it to.
"""

from typing import Any, Sequence


class LpboxError(Exception):
    """Base class for every error raised by lpbox."""

    exit_code: int = 1


class ArgumentError(LpboxError, ValueError):
    """Invalid call arguments: dimension mismatch, non-positive time, bad orders."""


class CapabilityError(LpboxError):
    """A configured cap (degree, order, grid size) would be exceeded."""

    exit_code = 4


class ConfigError(LpboxError, ValueError):
    """Experiment configuration could not be read or validated."""

    exit_code = 3


class EvaluationError(LpboxError, ArithmeticError):
    """A numerical evaluation produced a non-finite value."""

    def __init__(self, message: str, location: Sequence[float] | Any | None = None):
        self.location = _as_list(location)
        if self.location is not None:
            message = f"{message} (at {self.location})"
        super().__init__(message)


class IntegrabilityError(EvaluationError):
    """An integrand failed its tail/decay check."""


def _as_list(location: Any) -> list[float] | None:
    if location is None:
        return None
    try:
        return [float(v) for v in location]
    except TypeError:
        return [float(location)]
