from core.exceptions import ChamberKitError, InternalInconsistency


class LatticeError(ChamberKitError):
    pass


class DimensionMismatch(LatticeError):
    pass


class SingularLefschetz(LatticeError):
    """L_H is not invertible at the requested class."""


class DegenerateForm(LatticeError):
    """The restricted Hodge form is singular; ``witness`` spans part of its kernel."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class PowerInversionError(LatticeError):
    """Base for the three distinct ways Newton inversion of the power map fails."""


class SingularDerivative(PowerInversionError):
    pass


class NoConvergence(PowerInversionError):
    def __init__(self, message: str, trace=()):
        self.trace = tuple(trace)
        super().__init__(message)


class ResultNotAmple(PowerInversionError):
    def __init__(self, message: str, alpha=None):
        self.alpha = alpha
        super().__init__(message)


class NonGeometricForm(InternalInconsistency):
    """Lattice data violates an inequality every geometric form satisfies."""
