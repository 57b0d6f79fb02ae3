"""Configuration for SAS-MDP.

Settings are read from the process environment after loading an optional
``.env`` file. Command-line flags and tool request fields override them.
"""

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class SolverSettings(BaseModel):
    """Default numerical settings shared by the CLI and the MCP server."""

    eps: float = Field(1e-8, gt=0, description="Value-iteration precision")
    tol: float = Field(1e-8, gt=0, description="LP constraint violation tolerance")
    max_iters: int = Field(10_000, ge=1, description="Value-iteration iteration cap")
    seed: int = Field(0, ge=0, description="Master seed for sampling and learning")
    log_level: str = Field("INFO", description="Root logging level")
    ads_samples: int = Field(1000, ge=1, description="Availability draws per ADS backup")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate that the log level is a standard level name."""
        v = v.upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {LOG_LEVELS}")
        return v

    @classmethod
    def from_env(cls, dotenv_path: Optional[Path] = None) -> "SolverSettings":
        """Build settings from ``SAS_*`` environment variables.

        Args:
            dotenv_path: Optional explicit ``.env`` file; the default search
                applies when omitted

        Returns:
            Validated settings
        """
        if dotenv_path is not None and dotenv_path.exists():
            load_dotenv(dotenv_path=str(dotenv_path))
            logger.info(f"Loaded environment variables from {dotenv_path}")
        else:
            load_dotenv()

        env_map = {
            "eps": "SAS_EPS",
            "tol": "SAS_TOL",
            "max_iters": "SAS_MAX_ITERS",
            "seed": "SAS_SEED",
            "log_level": "SAS_LOG_LEVEL",
            "ads_samples": "SAS_ADS_SAMPLES",
        }
        values = {
            field: os.environ[var] for field, var in env_map.items() if var in os.environ
        }
        return cls(**values)


def configure_logging(level: str = "INFO") -> None:
    """Configure the root logger the way every entry point does."""
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, level.upper()))
