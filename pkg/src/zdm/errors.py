"""Exception types raised across the toolkit."""


class ZDMError(Exception):
    """Base class for every error raised by this package."""


class EmptyLanguage(ZDMError):
    pass


class ShapeTooLarge(ZDMError):
    pass


class ShapeMismatch(ZDMError):
    pass


class MarkerNotFound(ZDMError):
    def __init__(self, max_L, n_cap, note=""):
        self.max_L = max_L
        self.n_cap = n_cap
        msg = f"no marker found with word length <= {max_L} and covering bound <= {n_cap}"
        if note:
            msg += f" ({note})"
        super().__init__(msg)


class NotGenericEnough(ZDMError):
    def __init__(self, error, bound=None):
        self.error = error
        self.bound = bound
        super().__init__(f"sample error {error} exceeds {bound}")


class GapOutOfRange(ZDMError):
    def __init__(self, start, gap):
        self.start = start
        self.gap = gap
        super().__init__(f"marker gap {gap} at column {start} is out of range")


class NoMarkers(ZDMError):
    pass


class UncoveredPrefix(ZDMError):
    pass


class CoverFailure(ZDMError):
    pass


class QuadratureBudgetExceeded(ZDMError):
    pass


class NoSmallPiece(ZDMError):
    def __init__(self, stage, piece):
        self.stage = stage
        self.piece = piece
        super().__init__(f"no admissible clopen piece at stage {stage} for index block {piece}")


class OutsideSimplex(ZDMError):
    pass


class NotDense(ZDMError):
    def __init__(self, vertex, gap):
        self.vertex = vertex
        self.gap = gap
        super().__init__(f"vertex {vertex} lies {gap:.3g} away from the face")


class GroupTooCoarse(ZDMError):
    pass


class PlacementConflict(ZDMError):
    pass


class ConfigError(ZDMError):
    pass


class CertificateFailure(ZDMError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)
