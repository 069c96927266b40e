from core.exceptions import ChamberKitError, InternalInconsistency


class KRingError(ChamberKitError):
    pass


class ModelMismatch(KRingError):
    """Classes from different cohomology models were combined."""


class ModelInconsistent(InternalInconsistency):
    """Multiplication, Todd or pairing data of a model contradict each other."""


class DegenerateMultipolarisation(KRingError):
    """Some d_i = H_1...H_{n-1}.H_i vanishes, so a point lift is undefined."""


class InvalidPointLift(KRingError):
    """A replacement point lift does not restrict to a point class of X^(k)."""
