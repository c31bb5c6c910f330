"""
mopasym Configuration Module

Centralized configuration using pydantic-settings. Values come from
environment variables prefixed with ``MOPASYM_`` (and a ``.env`` file when
present), falling back to the defaults below.

Usage:
    from mopasym.config import settings

    ctx = PrecisionContext(digits=settings.DIGITS, guard=settings.GUARD)
"""

from typing import Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """
    Library and CLI settings.

    Attributes:
        DIGITS: Default decimal working precision (MOPASYM_DIGITS).
        GUARD: Guard digits; series stop at 10^(GUARD-DIGITS) relative size.
        LOG_LEVEL: Logging level for the CLI (debug, info, warning, error).
        WORKERS: Worker processes for panel runs (1 = run in-process).
        OUTPUT_FORMAT: Default report format, csv or json.
        PANEL_FILE: Optional run configuration replacing the bundled default panel.
        VERIFY_REPORT: File receiving the JSON verify report when --out is not given.
    """

    model_config = SettingsConfigDict(
        env_prefix="MOPASYM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    DIGITS: int = Field(default=50, ge=20, description="Decimal working precision")
    GUARD: int = Field(default=10, ge=1, description="Guard digits below the working precision")
    LOG_LEVEL: str = Field(
        default="warning",
        description="Logging level (debug, info, warning, error, critical)",
    )
    WORKERS: int = Field(default=1, ge=1, description="Worker processes for panel runs")
    OUTPUT_FORMAT: str = Field(default="csv", description="Report format: csv or json")
    PANEL_FILE: Optional[str] = Field(
        default=None,
        description="Run configuration JSON used instead of the bundled default panel",
    )
    VERIFY_REPORT: str = Field(
        default="mopasym-verify.json",
        description="JSON report written by verify when --out is not given",
    )

    @field_validator("OUTPUT_FORMAT", mode="before")
    @classmethod
    def _normalize_format(cls, value):
        if isinstance(value, str):
            value = value.strip().lower()
        if value not in {"csv", "json"}:
            raise ValueError("OUTPUT_FORMAT must be csv or json")
        return value

    @model_validator(mode="after")
    def _guard_below_digits(self):
        if self.GUARD >= self.DIGITS:
            raise ValueError("GUARD must be smaller than DIGITS.")
        return self


# Global settings instance
settings = Settings()
