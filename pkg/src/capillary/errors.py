"""Exception hierarchy shared by all stages."""


class CapillaryError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CapillaryError, ValueError):
    """Input data violate the hypotheses (angles, disjoint caps, areas)."""


class DomainError(CapillaryError, ValueError):
    """An argument is outside the domain of a closed-form formula."""


class RepairError(CapillaryError):
    """Area repair would make some face area non-positive."""


class ClosureError(CapillaryError):
    """A discrete measure cannot be closed by a small positive correction."""


class PreconditionError(CapillaryError, ValueError):
    pass


class GeometryError(CapillaryError):
    """Halfspace intersection is unbounded or otherwise degenerate."""


class PredicateError(GeometryError):
    pass


class DegeneracyError(GeometryError):
    """A face polygon that must be non-empty has vanished numerically."""


class ConvergenceError(CapillaryError):
    """Iteration cap hit; ``residual`` holds the last relative area residual."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StageError(CapillaryError):
    """Wraps a failure inside :func:`capillary.pipeline.run` with the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
