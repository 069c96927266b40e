from core.exceptions import ChamberKitError, InternalInconsistency


class SheafModelError(ChamberKitError):
    pass


class IdenticallyEqual(SheafModelError):
    """Subobject and total have equal slope on the whole segment."""


class ConstancyViolation(InternalInconsistency):
    """Two points of one cell received different verdicts; some wall is missing."""

    def __init__(self, message: str, first=None, second=None):
        self.first = first
        self.second = second
        super().__init__(message)
