# wavenoise/schemas/run_config.py
"""
Per-run configuration for the command-line front end.
Validated before any computation and written next to every run's outputs.
"""
import re
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from wavenoise.core.config import settings
from wavenoise.schemas.correlation import PearsonComponent
from wavenoise.schemas.spectrum import WindowKind
from wavenoise.schemas.wavelet import BasisKind, GridMode, Normalization, WaveletBasis

_SCALES_PATTERN = re.compile(r"^(full|log(:\d+)?)$")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: str = Field(..., pattern="^(synth|cwt|spectrum|coherence|correlate|vartransform)$")
    inputs: List[str] = Field(default_factory=list)
    out: str = "out"

    # Ingestion
    time_column: str = settings.TIME_COLUMN
    value_column: Optional[str] = None
    delimiter: str = settings.CSV_DELIMITER
    units: Optional[str] = None
    trim_start: float = Field(default=0.0, ge=0.0, description="Seconds dropped from the start of every series")

    # Wavelet
    basis: BasisKind = BasisKind(settings.DEFAULT_BASIS)
    both_bases: bool = False
    epsilon: float = settings.DEFAULT_EPSILON
    normalization: Normalization = Normalization(settings.DEFAULT_NORMALIZATION)
    scales: str = f"log:{settings.DEFAULT_SCALE_COUNT}"
    max_k: Optional[int] = None
    coi_only: bool = True
    cutoff: bool = True
    workers: int = Field(default=settings.CWT_WORKERS, ge=1)
    widths: List[int] = Field(default_factory=list, description="Widths k exported column by column")
    normalise_max: bool = False

    # Fourier
    welch_segments: int = Field(default=settings.WELCH_SEGMENTS, ge=1)
    welch_overlap: float = Field(default=settings.WELCH_OVERLAP, ge=0.0, lt=1.0)
    window: WindowKind = WindowKind(settings.WELCH_WINDOW)

    # Correlation and variance transform
    pearson_component: PearsonComponent = PearsonComponent.AUTO
    unit_variance: bool = False

    # Synthesis
    seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)
    preset: Optional[str] = None
    recipe: Optional[str] = None
    n: int = Field(default=8192, ge=2, description="Preset length")
    dt: float = Field(default=1.0, gt=0, description="Preset sampling interval in seconds")

    # Output
    svg: bool = False
    svg_scale: str = Field(default="linear", pattern="^(linear|log)$")

    @field_validator("scales")
    @classmethod
    def validate_scales(cls, v):
        if not _SCALES_PATTERN.match(v):
            raise ValueError("scales must be 'full', 'log' or 'log:COUNT'")
        if v.startswith("log:") and int(v.split(":", 1)[1]) < 1:
            raise ValueError("log scale count must be positive")
        return v

    @field_validator("max_k")
    @classmethod
    def validate_max_k(cls, v):
        if v is not None and (v < 2 or v % 2 != 0):
            raise ValueError("max_k must be an even integer >= 2")
        return v

    @field_validator("widths")
    @classmethod
    def validate_widths(cls, v):
        if any(k < 2 or k % 2 != 0 for k in v):
            raise ValueError("every width must be an even integer >= 2")
        return sorted(set(v))

    @model_validator(mode="after")
    def validate_basis(self):
        if self.uses_morlet:
            if self.epsilon < settings.MIN_EPSILON:
                raise ValueError(f"epsilon must be at least {settings.MIN_EPSILON}")
        return self

    @property
    def uses_morlet(self) -> bool:
        """coherence always runs a Morlet transform whatever --basis says"""
        return self.basis == BasisKind.MORLET or self.both_bases or self.command == "coherence"

    @property
    def grid_mode(self) -> GridMode:
        return GridMode.FULL if self.scales == "full" else GridMode.LOG_SPACED

    @property
    def scale_count(self) -> int:
        if ":" in self.scales:
            return int(self.scales.split(":", 1)[1])
        return settings.DEFAULT_SCALE_COUNT

    def wavelet_basis(self, kind: Optional[BasisKind] = None) -> WaveletBasis:
        return WaveletBasis(
            kind=kind or self.basis,
            epsilon=self.epsilon,
            normalization=self.normalization,
        )

    def bases(self) -> List[WaveletBasis]:
        if self.both_bases:
            return [self.wavelet_basis(BasisKind.HAAR), self.wavelet_basis(BasisKind.MORLET)]
        return [self.wavelet_basis()]
