"""
Serialises result tables as CSV or JSON with shortest round-trip floats.
"""
from __future__ import annotations

import io
import math
from typing import Any, Mapping

import numpy as np
import orjson
import pandas as pd

from src.dtos.request import OutputFormat


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if math.isnan(value) else repr(value)
    if isinstance(value, np.integer):
        return int(value)
    if value is None or value is pd.NA:
        return ""
    return value


def _metadata_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(table: pd.DataFrame, metadata: Mapping[str, Any]) -> str:
    """
    Metadata as ``# key=value`` lines, then the table with a header row.

    Floats are written with ``repr``, so every value round-trips exactly.
    """
    buffer = io.StringIO()
    for key, value in metadata.items():
        buffer.write(f"# {key}={_metadata_value(value)}\n")
    table.map(_cell).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def _json_ready(value: Any) -> Any:
    if value is None or value is pd.NA:
        return None
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, np.integer):
        return int(value)
    return value


def render_json(table: pd.DataFrame, metadata: Mapping[str, Any]) -> str:
    rows = [{k: _json_ready(v) for k, v in row.items()} for row in table.to_dict(orient="records")]
    payload = {"metadata": {k: _json_ready(v) for k, v in metadata.items()}, "rows": rows}
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE).decode()


def render(table: pd.DataFrame, metadata: Mapping[str, Any], output_format: OutputFormat) -> str:
    if output_format is OutputFormat.JSON:
        return render_json(table, metadata)
    return render_csv(table, metadata)


def read_csv_output(text: str) -> pd.DataFrame:
    """Parse CSV produced by ``render_csv``; metadata lines are skipped."""
    return pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip")


def read_csv_metadata(text: str) -> dict[str, str]:
    metadata = {}
    for line in text.splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition("=")
        metadata[key] = value
    return metadata
