"""Exception hierarchy shared by all stages.

The CLI maps these onto distinct exit codes, so raise the most specific
class available.
"""


class DotGatesError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(DotGatesError, ValueError):
    """A physical parameter is outside its admissible domain."""


class OracleUnconvergedError(DotGatesError):
    """A quadrature or grid oracle failed its internal convergence check."""


class ConsistencyError(DotGatesError):
    """Artifacts generated from different bases/materials were mixed."""


class IdentificationError(DotGatesError):
    """The qubit states (X0, X1, X0+X1) could not be identified."""


class ResolutionError(DotGatesError):
    """Two conditional transition lines are closer than the resolvable splitting."""


class StiffnessError(DotGatesError):
    """Adaptive step control underflowed the minimum step size."""


class CommensurabilityError(DotGatesError):
    """No readout time satisfies the phase conditions within the horizon.

    Carries the best candidate found so the caller can report partial results.
    """

    def __init__(self, message, best_time=None, best_phases=None):
        super().__init__(message)
        self.best_time = best_time
        self.best_phases = best_phases


class ConfigError(DotGatesError):
    """The run configuration is malformed or violates the schema."""


class StageOrderError(DotGatesError):
    """A pipeline stage was invoked before its input artifacts exist."""
