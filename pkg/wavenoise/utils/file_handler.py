# wavenoise/utils/file_handler.py
"""
Output file utilities
CSV tables carry '#' metadata lines ahead of the header so they stay readable
by the ingestion path; every table also gets a JSON sidecar on request.
"""
import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from wavenoise.core.config import settings

PathLike = Union[str, Path]


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    """
    Write a JSON document

    Args:
        path: Destination file
        payload: JSON-serializable mapping (numpy scalars and arrays allowed)

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_csv_table(
    path: PathLike,
    columns: Mapping[str, Sequence],
    metadata: Optional[Mapping[str, Any]] = None,
    delimiter: str = ",",
    sidecar: bool = False,
) -> Path:
    """
    Write named columns as CSV with '#' metadata lines

    Args:
        path: Destination file
        columns: Ordered column name -> values
        metadata: Written as '# key: json-value' lines before the header
        delimiter: Field separator
        sidecar: Also write the metadata to <path>.json

    Returns:
        Path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({name: np.asarray(values) for name, values in columns.items()})

    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in (metadata or {}).items():
            f.write(f"# {key}: {json.dumps(_jsonable(value))}\n")
        frame.to_csv(f, sep=delimiter, index=False, float_format=settings.float_format)

    if sidecar:
        write_json(path.with_suffix(".json"), dict(metadata or {}))
    return path


def write_rows(path: PathLike, rows: Sequence[Mapping[str, Any]], metadata: Optional[Mapping[str, Any]] = None,
               columns: Optional[Sequence[str]] = None) -> Path:
    """Long-form table from a list of row mappings"""
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    return write_csv_table(path, {name: frame[name].to_numpy() for name in frame.columns}, metadata)


def write_matrix_csv(
    path: PathLike,
    matrix: np.ndarray,
    row_label: str,
    row_values: Sequence,
    column_values: Sequence,
    metadata: Optional[Mapping[str, Any]] = None,
) -> Path:
    """
    Write a real matrix: one row per translation, one column per scale

    Columns are named 'k=<value>'; a JSON sidecar of the metadata is written
    next to the CSV.
    """
    columns = {row_label: np.asarray(row_values)}
    for j, value in enumerate(column_values):
        columns[f"k={int(value)}"] = matrix[:, j]
    return write_csv_table(path, columns, metadata, sidecar=True)


def read_csv_metadata(path: PathLike) -> Dict[str, Any]:
    """Parse the '# key: json-value' header lines of a written table"""
    metadata = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, raw = line[1:].partition(":")
            metadata[key.strip()] = json.loads(raw.strip())
    return metadata


def read_table(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", encoding="utf-8")
