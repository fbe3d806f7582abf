"""
Application settings and configuration management.
"""

from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Numeric backend
    LCK_BACKEND: str = Field(default="exact", description="Scalar backend: exact or float")
    LCK_TOL: float = Field(default=1e-9, description="Comparison tolerance of the float backend")

    # Search
    SEARCH_MAX_DENOMINATOR: int = Field(
        default=10**6,
        description="Denominator bound for continued-fraction rounding of search candidates",
    )
    SEARCH_WORKERS: int = Field(default=4, description="Worker threads for sample partitioning")
    SEARCH_SWEEPS: int = Field(default=60, description="Coordinate-descent sweeps per sample")
    SEARCH_SAMPLE_RADIUS: int = Field(default=3, description="Half-width of the sampling box")
    SEARCH_SAMPLE_DENOMINATOR: int = Field(
        default=4, description="Denominator of sampled rational coordinates"
    )
    SEARCH_ROUNDING_RADIUS: float = Field(
        default=1e-6, description="Largest coordinate distance between a minimum and its rounding"
    )
    SEARCH_SECANT_DENOMINATOR: int = Field(
        default=1000, description="Denominator bound of secant directions from an exact grid point"
    )
    SEARCH_REPAIR_RADIUS: float = Field(
        default=1e-2, description="Largest coordinate distance between a minimum and its secant repair"
    )

    # Logging
    LOG_LEVEL: str = Field(default="WARNING", description="Logging level")
    LOG_FORMAT: str = Field(default="text", description="Log format: json or text")
    LOG_FILE: str = Field(default="", description="Log file path (empty disables file logging)")

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    @field_validator("LCK_BACKEND")
    @classmethod
    def validate_backend(cls, v: str) -> str:
        """Only the two supported scalar backends are accepted."""
        v = v.strip().lower()
        if v not in ("exact", "float"):
            raise ValueError(f"LCK_BACKEND must be 'exact' or 'float', got {v!r}")
        return v

    @field_validator("LCK_TOL")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("LCK_TOL must be positive")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
