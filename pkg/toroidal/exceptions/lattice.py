from .base import AppError


class LatticeError(AppError):
    pass


class AmbientRankMismatchError(LatticeError):
    pass


class NotPrimeError(LatticeError):
    pass


class NotInSpaceError(LatticeError):
    pass


class NoSolutionError(LatticeError):
    pass


class ZeroVectorError(LatticeError):
    pass
