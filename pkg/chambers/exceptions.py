from core.exceptions import EXIT_BUDGET, ChamberKitError, InternalInconsistency


class ChambersError(ChamberKitError):
    pass


class EmptyRegion(ChambersError):
    pass


class WallContainsSegment(ChambersError):
    """a.gamma vanishes at both ends, so the wall contains the whole segment."""

    def __init__(self, message: str, wall=None):
        self.wall = wall
        super().__init__(message)


class IdenticallyZero(ChambersError):
    """The wall contains the power image of the whole ample segment."""


class PreconditionFailed(ChambersError):
    pass


class NotFound(ChambersError):
    exit_code = EXIT_BUDGET

    def __init__(self, message: str, tried: int = 0):
        self.tried = tried
        super().__init__(message)


class NoRationalPointFound(ChambersError):
    exit_code = EXIT_BUDGET


class BNotAmple(ChambersError):
    exit_code = EXIT_BUDGET

    def __init__(self, message: str, b=None):
        self.b = b
        super().__init__(message)


class VerificationFailed(InternalInconsistency):
    pass
