from .base import AppError


class EtdError(AppError):
    """
    Validation failure of an ETD. `witness` carries the offending data so the
    CLI can print it as a structured diagnostic.
    """

    def __init__(self, message: str, witness: dict | None = None):
        super().__init__(message)
        self.witness = witness or {}


class NotInjectiveError(EtdError):
    pass


class NotFreeBasisError(EtdError):
    pass


class BasisNotFaceUnionError(NotFreeBasisError):
    pass


class FacetSetTooSmallError(EtdError):
    pass


class InvalidFacetError(EtdError):
    pass


class NotInEssentialSetError(EtdError):
    pass


class InvalidIdealError(EtdError):
    pass


class UnsupportedBaseError(EtdError):
    pass


class DegenerateSimplexError(EtdError):
    pass


class EtdFileError(AppError):
    """
    Raised when an ETD file cannot be read or does not match the schema.
    `diagnostics` holds one entry per offending field or line.
    """

    def __init__(self, message: str, diagnostics: list[dict] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []
