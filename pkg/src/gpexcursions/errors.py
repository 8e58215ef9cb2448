"""Exception hierarchy shared across the package."""


class LevelCrossingError(Exception):
    """Base class for all errors raised by gpexcursions."""


class AcfRangeError(LevelCrossingError, ValueError):
    """A tabulated autocorrelation was evaluated outside its lag range."""


class EstimationError(LevelCrossingError, ValueError):
    """Spectral moments could not be estimated from a tabulated ACF."""


class SynthesisError(LevelCrossingError, RuntimeError):
    """Circulant embedding rejected the model/grid combination."""


class DomainError(LevelCrossingError, ValueError):
    """An argument lies outside the domain of a closed-form result."""


class PreconditionError(LevelCrossingError, ValueError):
    """The hypotheses of an asymptotic theorem are not met by the model."""


class ConditioningError(LevelCrossingError, ZeroDivisionError):
    """A conditional expectation was requested on a null event."""


class OracleInsufficientError(LevelCrossingError, RuntimeError):
    """The Monte Carlo oracle produced too few conditioned draws."""

    def __init__(self, message, conditioning_rate=None):
        super().__init__(message)
        self.conditioning_rate = conditioning_rate


class ConfigError(LevelCrossingError, ValueError):
    """A run configuration is invalid."""
