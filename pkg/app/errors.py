"""
Exception hierarchy shared by the simulation library, the checks and the CLI.
"""


class ReinforceError(Exception):
    """Base class for all errors raised by the lab."""


class ParameterError(ReinforceError, ValueError):
    """A parameter lies outside its admissible domain."""


class UsageError(ReinforceError, ValueError):
    """A routine was called in a way its contract does not allow."""


class RegimeError(ReinforceError, ValueError):
    """An evaluator was asked for parameters outside the regime it covers."""


class SimulationError(ReinforceError, RuntimeError):
    """An internal invariant of a simulation was violated."""


__all__ = [
    "ReinforceError",
    "ParameterError",
    "UsageError",
    "RegimeError",
    "SimulationError",
]
