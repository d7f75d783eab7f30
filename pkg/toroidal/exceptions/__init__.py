from .base import AppError, InvalidSettingsError
from .lattice import (
    LatticeError,
    AmbientRankMismatchError,
    NotPrimeError,
    NotInSpaceError,
    NoSolutionError,
    ZeroVectorError,
)
from .monoid import (
    MonoidError,
    EmptyGeneratorsError,
    NotSharpError,
    NotSaturatedMonoidError,
    NotInMonoidError,
    NotAFaceError,
    InvalidGradingError,
)
from .etd import (
    EtdError,
    NotInjectiveError,
    NotFreeBasisError,
    BasisNotFaceUnionError,
    FacetSetTooSmallError,
    InvalidFacetError,
    NotInEssentialSetError,
    InvalidIdealError,
    UnsupportedBaseError,
    DegenerateSimplexError,
    EtdFileError,
)

__all__ = [
    "AppError",
    "InvalidSettingsError",
    "LatticeError",
    "AmbientRankMismatchError",
    "NotPrimeError",
    "NotInSpaceError",
    "NoSolutionError",
    "ZeroVectorError",
    "MonoidError",
    "EmptyGeneratorsError",
    "NotSharpError",
    "NotSaturatedMonoidError",
    "NotInMonoidError",
    "NotAFaceError",
    "InvalidGradingError",
    "EtdError",
    "NotInjectiveError",
    "NotFreeBasisError",
    "BasisNotFaceUnionError",
    "FacetSetTooSmallError",
    "InvalidFacetError",
    "NotInEssentialSetError",
    "InvalidIdealError",
    "UnsupportedBaseError",
    "DegenerateSimplexError",
    "EtdFileError",
]
