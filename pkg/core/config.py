"""Process-wide settings.

Defaults come from environment variables (optionally from a `.env` file
loaded with python-dotenv). Algorithm parameters that vary per run live in
`schemas.config_schema`; this module only supplies their defaults.
"""

import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ROOT_DIR = Path(__file__).resolve().parents[1]

load_dotenv()


class Settings(BaseModel):
    """Environment-backed defaults."""

    default_prime: int = Field(2147483647, gt=2, lt=2**31)
    sample_range: int = Field(10**6, ge=0)
    n_max: int = Field(200, ge=1)
    seed: int = 0
    log_level: str = "INFO"
    log_dir: Path = ROOT_DIR / "logs"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Build the settings object once from the current environment."""
    env = {
        "default_prime": os.getenv("ANNIHILATOR_DEFAULT_PRIME"),
        "sample_range": os.getenv("ANNIHILATOR_SAMPLE_RANGE"),
        "n_max": os.getenv("ANNIHILATOR_N_MAX"),
        "seed": os.getenv("ANNIHILATOR_SEED"),
        "log_level": os.getenv("ANNIHILATOR_LOG_LEVEL"),
        "log_dir": os.getenv("ANNIHILATOR_LOG_DIR"),
    }
    return Settings(**{k: v for k, v in env.items() if v is not None})
