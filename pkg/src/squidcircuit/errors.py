"""Exception hierarchy shared by all modules."""


class SquidCircuitError(Exception):
    """Base class for all package errors."""


class DomainError(SquidCircuitError, ValueError):
    """An argument lies outside the physical domain of a formula."""


class SingularityError(DomainError):
    """A formula diverges at the requested point."""


class SolverError(SquidCircuitError, RuntimeError):
    """An iterative solver failed to converge.

    ``diagnostics`` carries whatever state helps reproduce the failure.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class RegimeError(DomainError):
    """The operating point is outside the validity regime of a model."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DataQualityError(SquidCircuitError, ValueError):
    """Measured data violate an assumption of the analysis."""


class FitError(SquidCircuitError, RuntimeError):
    """A least-squares fit did not converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class AlignmentError(DataQualityError):
    """Two traces that must share a frequency grid do not."""


class ConfigError(SquidCircuitError, ValueError):
    """A configuration document is invalid; ``path`` locates the problem."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
