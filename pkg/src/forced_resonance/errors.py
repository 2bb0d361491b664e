"""Exception hierarchy.

`SolverFailure` subclasses are numerical failures (the CLI maps them to exit
code 3); everything else is a usage or validation problem.
"""


class ResonanceError(Exception):
    """Base class for all package errors."""


class SolverFailure(ResonanceError):
    """A numerical procedure did not deliver a result."""


class StepSizeUnderflow(SolverFailure):
    pass


class RadiusTooSmall(SolverFailure):
    """The polar chart was used at a radius at or below the floor."""


class NoContractionFound(SolverFailure):
    pass


class NoFixedPoint(SolverFailure):
    def __init__(self, message, *, min_residual=float("nan"), max_radius=float("nan")):
        super().__init__(message)
        self.min_residual = min_residual
        self.max_radius = max_radius


class NewtonDiverged(SolverFailure):
    def __init__(self, message, *, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class SweepIncomplete(SolverFailure):
    def __init__(self, message, *, partial=None, xi_failed=float("nan")):
        super().__init__(message)
        self.partial = partial
        self.xi_failed = xi_failed


class FoldOnBoundary(SolverFailure):
    pass


class ZeroDirection(ResonanceError, ValueError):
    pass


class ConfigError(ResonanceError, ValueError):
    pass
