"""Exception hierarchy shared by all modules."""


class CritShockError(Exception):
    """Base class for every error raised by this package."""

    #: short machine-readable tag used by the CLI error line
    kind = "error"


class RootFindingError(CritShockError):
    kind = "root"


class QuadratureError(CritShockError):
    kind = "quadrature"


class IntegrationError(CritShockError):
    kind = "ode"


class ZeroPivotError(CritShockError):
    kind = "zero_pivot"

    def __init__(self, message: str, row: int):
        self.row = row
        super().__init__(message)


class ModelError(CritShockError):
    kind = "model"


class NoSteepeningError(CritShockError):
    kind = "no_steepening"


class NonGenericError(CritShockError):
    kind = "non_generic"


class BoundaryMinimumError(CritShockError):
    kind = "boundary_minimum"


class CuspRegionError(CritShockError):
    kind = "cusp"


class MultipleRootsError(CritShockError):
    kind = "multiple_roots"


class AdmissibilityError(CritShockError):
    kind = "admissibility"


class SolverError(CritShockError):
    kind = "solver"


class ShockFrontError(CritShockError):
    kind = "shockfront"
