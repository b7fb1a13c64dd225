"""Exception hierarchy shared by all simulator modules."""


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(SimulationError, ValueError):
    """Invalid parameters or configuration file content."""


class DomainError(SimulationError, ValueError):
    """An argument lies outside the domain where a model is defined."""


class NumericError(SimulationError, ArithmeticError):
    """Non-finite input or a numerically degenerate computation."""


class EstimationError(SimulationError):
    """Channel estimation cannot proceed (e.g. a column without pilots)."""


class DegenerateChannelError(NumericError):
    """All singular values are zero, so no stream can carry power."""
