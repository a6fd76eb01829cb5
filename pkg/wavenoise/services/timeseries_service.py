# wavenoise/services/timeseries_service.py
"""
Ingestion, validation, alignment and summary statistics for sampled series
"""
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from wavenoise.core.config import settings
from wavenoise.core.errors import (
    DimensionMismatchError,
    EmptyOverlapError,
    InputFileError,
    InsufficientSeriesError,
    MissingColumnError,
    NonFiniteValueError,
    NonMonotoneTimeError,
    NonUniformSamplingError,
    TooFewSamplesError,
)
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.utils.file_handler import write_csv_table

logger = logging.getLogger(__name__)


def centered(values: np.ndarray) -> np.ndarray:
    """values minus their mean; a constant input gives exact zeros"""
    values = np.asarray(values)
    anchor = values[0]
    shifted = values - anchor
    return shifted - shifted.mean()


def lower_median(values: np.ndarray) -> float:
    ordered = np.sort(values)
    return float(ordered[(ordered.size - 1) // 2])


class TimeSeriesService:
    """Service class for loading and preparing time series"""

    def __init__(
        self,
        uniformity_tolerance: Optional[float] = None,
        delimiter: Optional[str] = None,
    ):
        self.uniformity_tolerance = (
            settings.UNIFORMITY_TOLERANCE if uniformity_tolerance is None else uniformity_tolerance
        )
        self.delimiter = delimiter or settings.CSV_DELIMITER

    # ========================================================================
    # INGESTION
    # ========================================================================

    def load_csv(
        self,
        path: Union[str, Path],
        time_column: Optional[str] = None,
        value_column: Optional[str] = None,
        units: str = "",
    ) -> TimeSeries:
        """
        Read one series from a CSV file with a header row

        Args:
            path: CSV file; '#' lines are comments
            time_column: Column holding timestamps in seconds
            value_column: Column holding values (default: first non-time column)
            units: Units recorded on the series

        Returns:
            TimeSeries with t0 = first timestamp and dt = median interval
        """
        path = Path(path)
        time_column = time_column or settings.TIME_COLUMN

        if not path.is_file():
            raise InputFileError(f"Input file not found: {path}", {"path": str(path)})

        try:
            frame = pd.read_csv(path, sep=self.delimiter, comment="#", encoding="utf-8")
        except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
            raise InputFileError(f"Could not parse {path}: {str(e)}", {"path": str(path)})

        frame.columns = [str(column).strip() for column in frame.columns]
        if time_column not in frame.columns:
            raise MissingColumnError(
                f"Time column '{time_column}' not found in {path}",
                {"column": time_column, "available": list(frame.columns)},
            )
        if value_column is None:
            candidates = [column for column in frame.columns if column != time_column]
            if not candidates:
                raise MissingColumnError(f"No value column in {path}", {"available": list(frame.columns)})
            value_column = candidates[0]
        elif value_column not in frame.columns:
            raise MissingColumnError(
                f"Value column '{value_column}' not found in {path}",
                {"column": value_column, "available": list(frame.columns)},
            )

        if len(frame) < 2:
            raise TooFewSamplesError(f"{path} has {len(frame)} rows; at least 2 are required")

        times = pd.to_numeric(frame[time_column], errors="coerce").to_numpy(dtype=np.float64)
        values = pd.to_numeric(frame[value_column], errors="coerce").to_numpy(dtype=np.float64)

        for name, column in ((time_column, times), (value_column, values)):
            bad = np.flatnonzero(~np.isfinite(column))
            if bad.size:
                raise NonFiniteValueError(
                    f"Column '{name}' has a non-finite value at row {int(bad[0])}",
                    {"column": name, "row": int(bad[0])},
                )

        intervals = np.diff(times)
        if np.any(intervals <= 0):
            row = int(np.flatnonzero(intervals <= 0)[0]) + 1
            raise NonMonotoneTimeError(
                f"Timestamps are not strictly increasing at row {row}", {"row": row}
            )

        dt = lower_median(intervals)
        deviation = float(np.max(np.abs(intervals - dt)))
        if deviation > self.uniformity_tolerance * dt:
            raise NonUniformSamplingError(
                f"Sampling interval deviates by {deviation:.6g} s from the median {dt:.6g} s; "
                f"resample the series before analysis",
                {"median_interval": dt, "max_deviation": deviation,
                 "tolerance": self.uniformity_tolerance},
            )

        series = TimeSeries(label=value_column, units=units, t0=float(times[0]), dt=dt, values=values)
        logger.info(f"Loaded '{series.label}' from {path}: N={series.n}, dt={series.dt:g} s")
        return series

    def write_csv(self, x: TimeSeries, path: Union[str, Path], time_column: Optional[str] = None) -> Path:
        """Write a series in the ingestion schema with '#' metadata lines"""
        time_column = time_column or settings.TIME_COLUMN
        return write_csv_table(
            path,
            {time_column: x.times, x.label: x.values},
            metadata={"label": x.label, "units": x.units, "t0": x.t0, "dt": x.dt, "n": x.n},
            delimiter=self.delimiter,
        )

    # ========================================================================
    # ALIGNMENT
    # ========================================================================

    def align_to_coarsest(self, raw: Sequence[TimeSeries]) -> SeriesSet:
        """
        Decimate every series onto the coarsest series' grid

        Args:
            raw: Series with possibly different dt and time ranges

        Returns:
            SeriesSet on the common overlap, sampled at the largest dt
        """
        raw = list(raw)
        if not raw:
            raise InsufficientSeriesError("align_to_coarsest needs at least one series")
        if len(raw) == 1:
            return SeriesSet(entries=raw, dropped={raw[0].label: 0})

        coarsest = raw[int(np.argmax([series.dt for series in raw]))]
        start = max(series.t0 for series in raw)
        end = min(series.t_end for series in raw)
        slack = 1e-9 * coarsest.dt
        if start > end + slack:
            raise EmptyOverlapError(
                f"Series do not overlap in time: window [{start:g}, {end:g}]",
                {"start": start, "end": end},
            )

        grid = coarsest.times
        target_times = grid[(grid >= start - slack) & (grid <= end + slack)]
        if target_times.size < 2:
            raise EmptyOverlapError(
                f"Overlap window [{start:g}, {end:g}] holds {target_times.size} samples of the coarsest grid",
                {"start": start, "end": end},
            )

        entries: List[TimeSeries] = []
        dropped = {}
        for series in raw:
            position = (target_times - series.t0) / series.dt
            # nearest sample, ties go to the earlier one
            index = np.clip(np.ceil(position - 0.5 - 1e-9).astype(np.int64), 0, series.n - 1)
            entries.append(series.with_values(series.values[index], t0=float(target_times[0]), dt=coarsest.dt))
            dropped[series.label] = series.n - target_times.size
            if dropped[series.label]:
                logger.info(f"Alignment dropped {dropped[series.label]} samples from '{series.label}'")

        return SeriesSet(entries=entries, dropped=dropped)

    def trim_start(self, x: TimeSeries, seconds: float) -> TimeSeries:
        """Drop every sample earlier than t0 + seconds"""
        if seconds <= 0:
            return x
        skip = math.ceil(seconds / x.dt - 1e-9)
        if x.n - skip < 2:
            raise TooFewSamplesError(
                f"Trimming {seconds:g} s leaves {max(x.n - skip, 0)} samples of '{x.label}'"
            )
        logger.info(f"Trimmed {skip} leading samples from '{x.label}'")
        return x.with_values(x.values[skip:], t0=x.t0 + skip * x.dt)

    # ========================================================================
    # STATISTICS
    # ========================================================================

    @staticmethod
    def mean(x: TimeSeries) -> float:
        return float(x.values[0] + (x.values - x.values[0]).mean())

    @staticmethod
    def std(x: TimeSeries) -> float:
        """Sample standard deviation (N - 1 denominator)"""
        deviations = centered(x.values)
        return float(math.sqrt(np.dot(deviations, deviations) / (x.n - 1)))

    @staticmethod
    def demean(x: TimeSeries) -> TimeSeries:
        return x.with_values(centered(x.values))

    @staticmethod
    def require_aligned(x: TimeSeries, y: TimeSeries) -> None:
        """Raise unless x and y share N and dt"""
        if x.n != y.n or not math.isclose(x.dt, y.dt, rel_tol=1e-12):
            raise DimensionMismatchError(
                f"'{x.label}' (N={x.n}, dt={x.dt:g}) and '{y.label}' (N={y.n}, dt={y.dt:g}) "
                f"are not aligned; run align_to_coarsest first",
            )
