class AppError(Exception):
    pass


class InvalidSettingsError(AppError):
    pass
