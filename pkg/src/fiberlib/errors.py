class FiberlibError(ValueError):
    """Base class for invalid inputs to fiberlib operations."""


class SpaceMismatch(FiberlibError):
    pass


class DimensionMismatch(FiberlibError):
    pass


class ZeroMass(FiberlibError):
    pass


class PartitionError(FiberlibError):
    pass


class AbsoluteContinuityError(FiberlibError):
    """A positive-mass atom is sent onto a null atom."""


class RankError(FiberlibError):
    pass


class ZeroVector(FiberlibError):
    pass


class ContractionError(FiberlibError):
    pass


class EmbeddingError(FiberlibError):
    pass


class MembershipError(FiberlibError):
    pass
