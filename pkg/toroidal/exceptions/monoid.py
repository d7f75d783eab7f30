from .base import AppError


class MonoidError(AppError):
    pass


class EmptyGeneratorsError(MonoidError):
    pass


class NotSharpError(MonoidError):
    pass


class NotSaturatedMonoidError(MonoidError):
    def __init__(self, message: str, missing: tuple[int, ...] | None = None):
        super().__init__(message)
        self.missing = missing


class NotInMonoidError(MonoidError):
    pass


class NotAFaceError(MonoidError):
    pass


class InvalidGradingError(MonoidError):
    pass
