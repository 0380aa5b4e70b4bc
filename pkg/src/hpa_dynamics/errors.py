"""Exception taxonomy shared across the package."""


class HpaError(Exception):
    """Base class for all package errors."""


class ModelDomainError(HpaError, ValueError):
    """Input outside the mathematical domain of a model function."""


class IntegrationError(HpaError, RuntimeError):
    """Integration failed (non-finite state or step-size underflow)."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SamplingError(HpaError, ValueError):
    """Trajectory queried outside its time range."""


class MetricError(HpaError, ValueError):
    """Invalid input to a goodness-of-fit metric."""


class FitError(HpaError, ValueError):
    """Invalid calibration setup (bounds, init, budget)."""


class SensitivityError(HpaError, ValueError):
    """Sensitivity computation impossible for the given inputs."""


class ConfigError(HpaError, ValueError):
    """Malformed run configuration file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ObservationError(HpaError, ValueError):
    """Malformed observation CSV."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
