# wavenoise/core/errors.py
"""
Exception hierarchy for the toolkit.
Every failure the analysis pipeline can report has its own class, a stable
machine-readable code, and a distinct process exit code for the CLI.
"""
from typing import Any, Dict, Optional


class WavenoiseError(ValueError):
    """Base class for all toolkit errors"""

    code: str = "wavenoise_error"
    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "error": self.code,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        if self.details:
            payload["details"] = self.details
        return payload


# ============================================================================
# CONFIGURATION
# ============================================================================

class ConfigValidationError(WavenoiseError):
    code = "config_invalid"
    exit_code = 3


class RecipeError(WavenoiseError):
    code = "recipe_invalid"
    exit_code = 4


# ============================================================================
# INGESTION
# ============================================================================

class InputFileError(WavenoiseError):
    code = "input_missing"
    exit_code = 10


class MissingColumnError(WavenoiseError):
    code = "column_missing"
    exit_code = 11


class NonMonotoneTimeError(WavenoiseError):
    code = "non_monotone_time"
    exit_code = 12


class TooFewSamplesError(WavenoiseError):
    code = "too_few_samples"
    exit_code = 13


class NonFiniteValueError(WavenoiseError):
    code = "non_finite_value"
    exit_code = 14


class NonUniformSamplingError(WavenoiseError):
    code = "non_uniform_sampling"
    exit_code = 15


class EmptyOverlapError(WavenoiseError):
    code = "empty_overlap"
    exit_code = 16


# ============================================================================
# TRANSFORMS AND ESTIMATORS
# ============================================================================

class InvalidScaleError(WavenoiseError):
    code = "invalid_scale"
    exit_code = 20


class InvalidWaveletParameterError(WavenoiseError):
    code = "invalid_wavelet_parameter"
    exit_code = 21


class DimensionMismatchError(WavenoiseError):
    code = "dimension_mismatch"
    exit_code = 22


class UnsupportedBasisError(WavenoiseError):
    code = "unsupported_basis"
    exit_code = 23


class SegmentationError(WavenoiseError):
    code = "segmentation_invalid"
    exit_code = 24


class ScaleCutoffError(WavenoiseError):
    code = "cutoff_removed_all_scales"
    exit_code = 25


class EmptyMatrixError(WavenoiseError):
    code = "empty_matrix"
    exit_code = 26


class InsufficientSeriesError(WavenoiseError):
    code = "insufficient_series"
    exit_code = 27


# ============================================================================
# SYNTHESIS
# ============================================================================

class RateTooHighError(WavenoiseError):
    code = "rate_too_high"
    exit_code = 30


def validation_messages(error) -> list:
    """Flatten a pydantic ValidationError into JSON-safe {loc, msg} entries"""
    return [
        {"loc": ".".join(str(part) for part in item["loc"]), "msg": item["msg"]}
        for item in error.errors()
    ]
