"""Exception hierarchy shared by every module."""


class ShiftFrameError(ValueError):
    """Base class for all library errors."""


class NonFinite(ShiftFrameError):
    pass


class NotNormal(ShiftFrameError):
    pass


class DegenerateClustering(ShiftFrameError):
    """Eigenvalues chain together across the clustering tolerance."""


class DegenerateEigenvalues(ShiftFrameError):
    """Two eigenvalues that must be distinct coincide within tolerance."""


class VectorOutsideSubspace(ShiftFrameError):
    pass


class InvalidBounds(ShiftFrameError):
    pass


class GridMismatch(ShiftFrameError):
    pass


class NoSpectralGap(ShiftFrameError):
    pass


class InfeasibleSpec(ShiftFrameError):
    pass


class SchemaError(ShiftFrameError):
    """Malformed instance or spec document; ``where`` names the offending field."""

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
