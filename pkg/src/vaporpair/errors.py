"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the physically meaningful domain."""


class ConfigError(ValueError):
    """A configuration value or file is invalid."""


class WindowingError(RuntimeError):
    """A grid is too short, too coarse, or not decayed enough for the
    requested transform."""


class EstimationError(RuntimeError):
    """A data-driven estimate cannot be formed from the given input."""


class SaturationError(EstimationError):
    """A measured rate is at or beyond the dead-time saturation limit."""
