# wavenoise/schemas/recipe.py
"""
Pydantic schemas for synthetic-noise recipes
"""
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ============================================================================
# COMPONENTS
# ============================================================================

class ComponentBase(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: Optional[int] = Field(default=None, description="Overrides the seed derived from the recipe seed")


class RtsComponent(ComponentBase):
    """Random telegraph signal between 0 and amplitude"""
    kind: Literal["rts"] = "rts"
    rate_up: float = Field(..., ge=0, description="0 -> amplitude switching rate in 1/s")
    rate_down: float = Field(..., ge=0, description="amplitude -> 0 switching rate in 1/s")
    amplitude: float = 1.0


class ColoredComponent(ComponentBase):
    """1/f^beta noise"""
    kind: Literal["colored"] = "colored"
    beta: float = Field(..., ge=0.0, le=2.0)
    level: float = Field(default=1.0, ge=0.0, description="Standard deviation of the generated series")


class SinusoidComponent(ComponentBase):
    kind: Literal["sinusoid"] = "sinusoid"
    frequency: float = Field(..., gt=0, description="Hz")
    amplitude: float = 1.0
    phase: float = 0.0
    burst_start: Optional[float] = Field(default=None, description="Seconds from t0")
    burst_end: Optional[float] = Field(default=None, description="Seconds from t0")

    @model_validator(mode="after")
    def validate_burst(self):
        if (self.burst_start is None) != (self.burst_end is None):
            raise ValueError("burst_start and burst_end must be given together")
        if self.burst_start is not None and not 0 <= self.burst_start < self.burst_end:
            raise ValueError("burst window must satisfy 0 <= burst_start < burst_end")
        return self

    @property
    def is_burst(self) -> bool:
        return self.burst_start is not None


class DriftComponent(ComponentBase):
    kind: Literal["drift"] = "drift"
    slope: float = Field(..., description="Units per second")


class WhiteComponent(ComponentBase):
    kind: Literal["white"] = "white"
    sigma: float = Field(..., ge=0.0)


NoiseComponent = Annotated[
    Union[RtsComponent, ColoredComponent, SinusoidComponent, DriftComponent, WhiteComponent],
    Field(discriminator="kind"),
]


# ============================================================================
# RECIPES
# ============================================================================

class NoiseRecipe(BaseModel):
    """Sum of components on one uniform grid"""
    model_config = ConfigDict(extra="forbid")

    label: str = "x"
    units: str = ""
    n: int = Field(..., ge=2, description="Number of samples")
    dt: float = Field(default=1.0, gt=0)
    t0: float = 0.0
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    components: List[NoiseComponent] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_bursts_inside_record(self):
        duration = self.n * self.dt
        for component in self.components:
            if isinstance(component, SinusoidComponent) and component.is_burst:
                if component.burst_end > duration:
                    raise ValueError(
                        f"burst window ends at {component.burst_end} s, after the record ({duration} s)"
                    )
        return self


class SeriesEntry(BaseModel):
    """One member of an ensemble; grid and default seed come from the ensemble"""
    model_config = ConfigDict(extra="forbid")

    label: str
    units: Optional[str] = None
    seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)
    components: List[NoiseComponent] = Field(default_factory=list)


class SharedComponent(BaseModel):
    """One component instance added to several series"""
    model_config = ConfigDict(extra="forbid")

    targets: List[str] = Field(..., min_length=2)
    component: NoiseComponent


class EnsembleRecipe(BaseModel):
    """Several series on one grid, optionally sharing component instances"""
    model_config = ConfigDict(extra="forbid")

    name: str = "ensemble"
    n: int = Field(..., ge=2)
    dt: float = Field(default=1.0, gt=0)
    t0: float = 0.0
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    units: str = ""
    series: List[SeriesEntry] = Field(..., min_length=1)
    shared: List[SharedComponent] = Field(default_factory=list)

    @field_validator("series")
    @classmethod
    def validate_unique_labels(cls, v):
        labels = [entry.label for entry in v]
        if len(set(labels)) != len(labels):
            raise ValueError("series labels must be unique")
        return v

    @model_validator(mode="after")
    def validate_targets(self):
        labels = set(self.labels)
        for shared in self.shared:
            unknown = set(shared.targets) - labels
            if unknown:
                raise ValueError(f"shared component targets unknown series: {sorted(unknown)}")
            component = shared.component
            if isinstance(component, SinusoidComponent) and component.is_burst:
                if component.burst_end > self.n * self.dt:
                    raise ValueError("shared burst window ends after the record")
        return self

    @property
    def labels(self) -> List[str]:
        return [entry.label for entry in self.series]

    def member_recipe(self, index: int, seed: int) -> NoiseRecipe:
        """NoiseRecipe for the index-th series with its independent components only"""
        entry = self.series[index]
        return NoiseRecipe(
            label=entry.label,
            units=self.units if entry.units is None else entry.units,
            n=self.n,
            dt=self.dt,
            t0=self.t0,
            seed=seed if entry.seed is None else entry.seed,
            components=entry.components,
        )
