"""
Process settings
Read from the environment (optionally a .env file at the project root).
"""

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

ROOT = Path(__file__).resolve().parents[3]
load_dotenv(ROOT / ".env")


class Settings(BaseModel):
    """Environment-driven knobs."""
    log_level: str = Field(default="WARNING", description="Level for the `app` logger")
    workers: int = Field(default=4, description="Threads used when detecting with several attributes")
    tos_max_pixels: int = Field(
        default=512 * 512,
        description="Largest image accepted by the tree-of-shapes builder",
    )

    @field_validator("workers", "tos_max_pixels")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    env = {
        "log_level": os.getenv("SHAPESPACE_LOG_LEVEL"),
        "workers": os.getenv("SHAPESPACE_WORKERS"),
        "tos_max_pixels": os.getenv("SHAPESPACE_TOS_MAX_PIXELS"),
    }
    return Settings(**{k: v for k, v in env.items() if v})
