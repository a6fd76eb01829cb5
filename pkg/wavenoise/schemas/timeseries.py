# wavenoise/schemas/timeseries.py
"""
Pydantic schemas for uniformly sampled series
Timestamps are implicit: t_n = t0 + n * dt
"""
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def as_frozen_array(values, dtype=np.float64) -> np.ndarray:
    """Copy into a contiguous read-only array"""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class TimeSeries(BaseModel):
    """Uniformly sampled real-valued signal"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: str = Field(default="x", description="Variable name")
    units: str = Field(default="", description="Units of the values")
    t0: float = Field(default=0.0, description="Time of the first sample in seconds")
    dt: float = Field(..., gt=0, description="Sampling interval in seconds")
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def validate_values(cls, v):
        array = np.asarray(v, dtype=np.float64)
        if array.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if array.size < 2:
            raise ValueError("a series needs at least 2 samples")
        if not np.all(np.isfinite(array)):
            raise ValueError("all values must be finite")
        return as_frozen_array(array)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n) * self.dt

    @property
    def t_end(self) -> float:
        return self.t0 + (self.n - 1) * self.dt

    @property
    def duration(self) -> float:
        return self.n * self.dt

    def with_values(self, values, **changes) -> "TimeSeries":
        """Same metadata, new samples"""
        data = {"label": self.label, "units": self.units, "t0": self.t0, "dt": self.dt}
        data.update(changes)
        return TimeSeries(values=values, **data)


class SeriesSet(BaseModel):
    """Series sharing one time step and one length"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: List[TimeSeries]
    dropped: Dict[str, int] = Field(default_factory=dict, description="Samples removed per label by alignment")

    @model_validator(mode="after")
    def validate_common_grid(self):
        if not self.entries:
            raise ValueError("a series set needs at least one entry")
        first = self.entries[0]
        for entry in self.entries[1:]:
            if entry.dt != first.dt or entry.n != first.n:
                raise ValueError(
                    f"series '{entry.label}' does not share dt/N with '{first.label}'"
                )
        return self

    @property
    def labels(self) -> List[str]:
        return [entry.label for entry in self.entries]

    @property
    def dt(self) -> float:
        return self.entries[0].dt

    @property
    def n(self) -> int:
        return self.entries[0].n

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, index: int) -> TimeSeries:
        return self.entries[index]
