import os
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from toroidal.exceptions.base import InvalidSettingsError

load_dotenv()

ENV_PREFIX = "TOROIDAL_"


class Settings(BaseModel):
    """Runtime defaults; every command option overrides its setting."""

    window: int = Field(default=20, ge=0)
    saturation_bound: int = Field(default=20, ge=0)
    ubound: int = Field(default=6, ge=0)
    max_prime: int = Field(default=13, ge=2)
    jobs: int = Field(default=1, ge=1)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"
    output_format: Literal["json", "csv", "text"] = "json"


def load_settings() -> Settings:
    """Reads TOROIDAL_* variables (after .env) into a validated Settings."""
    raw = {
        "window": os.getenv(f"{ENV_PREFIX}WINDOW"),
        "saturation_bound": os.getenv(f"{ENV_PREFIX}SATURATION_BOUND"),
        "ubound": os.getenv(f"{ENV_PREFIX}UBOUND"),
        "max_prime": os.getenv(f"{ENV_PREFIX}MAX_PRIME"),
        "jobs": os.getenv(f"{ENV_PREFIX}JOBS"),
        "log_level": os.getenv(f"{ENV_PREFIX}LOG_LEVEL", "").upper() or None,
        "output_format": os.getenv(f"{ENV_PREFIX}FORMAT"),
    }
    try:
        return Settings.model_validate({k: v for k, v in raw.items() if v is not None})
    except ValidationError as e:
        raise InvalidSettingsError(f"Invalid {ENV_PREFIX}* settings: {e}")
