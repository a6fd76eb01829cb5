# wavenoise/core/config.py
"""
Toolkit-wide defaults, overridable through WAVENOISE_* environment variables
"""
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Toolkit defaults using Pydantic for validation and environment management.
    Every field has a default; per-run choices live in RunConfig.
    """
    # Project
    PROJECT_NAME: str = "wavenoise"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Wavelet-based noise analysis for long time series"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    # Ingestion
    CSV_DELIMITER: str = ","
    TIME_COLUMN: str = "time"
    UNIFORMITY_TOLERANCE: float = 0.01  # fraction of the nominal interval

    # Wavelet transform
    DEFAULT_BASIS: str = "haar"
    DEFAULT_EPSILON: float = 5.0
    MIN_EPSILON: float = 5.0
    DEFAULT_NORMALIZATION: str = "unit_norm"
    MORLET_TRUNCATION: int = 4      # kernel support |n - m| <= 4k
    DEFAULT_SCALE_COUNT: int = 48
    FULL_GRID_WARN_N: int = 4096   # full grids get a cost warning past this
    CWT_WORKERS: int = 1

    # Cone of influence
    COI_TRUST_FRACTION: float = 0.8

    # Welch
    WELCH_SEGMENTS: int = 8
    WELCH_OVERLAP: float = 0.5
    WELCH_WINDOW: str = "hann"
    MIN_SEGMENT_LENGTH: int = 8

    # Wavelet coherence smoothing
    SCALE_BOXCAR_WIDTH: float = 0.6
    TIME_SMOOTHING_FACTOR: float = 1.0  # tau = factor * lambda
    GAUSSIAN_TRUNCATION: float = 4.0

    # Correlation
    MIN_PAIR_COUNT: int = 3

    # Output
    FLOAT_DIGITS: int = 17
    SVG_MAX_COLUMNS: int = 600

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="WAVENOISE_",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("COI_TRUST_FRACTION", "UNIFORMITY_TOLERANCE")
    @classmethod
    def validate_fraction(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("must lie strictly between 0 and 1")
        return v

    @field_validator("MIN_EPSILON")
    @classmethod
    def validate_min_epsilon(cls, v):
        if v < 5.0:
            raise ValueError("MIN_EPSILON below 5 lets the Morlet wavelet degenerate into a Gaussian")
        return v

    @property
    def float_format(self) -> str:
        """printf-style format for every numeric output"""
        return f"%.{self.FLOAT_DIGITS}g"

    def get_output_path(self, out_dir: str) -> Path:
        """Resolve and create an output directory"""
        path = Path(out_dir).expanduser().resolve()
        path.mkdir(parents=True, exist_ok=True)
        return path


# Create settings instance
settings = Settings()
