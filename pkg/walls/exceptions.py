from core.exceptions import BudgetExceeded, ChamberKitError


class WallsError(ChamberKitError):
    pass


class InvalidNumerics(WallsError):
    """Sheaf invariants that cannot belong to a torsion-free sheaf of the given rank."""


class NegativeBound(WallsError):
    """Delta(F).phi^{n-2} < 0: the invariants violate Bogomolov at phi."""

    def __init__(self, message: str, value=None):
        self.value = value
        super().__init__(message)


class RegionNotInP(WallsError):
    """A region vertex has no certified ample preimage under the power map."""


class EnumerationBudgetExceeded(BudgetExceeded):
    def __init__(self, message: str, visited: int = 0):
        self.visited = visited
        super().__init__(message)
