"""
CSV emission for experiment outputs.

Floats are written with repr(), the shortest text that parses back to the
same double, so identical runs give byte-identical files.
"""

import logging
from dataclasses import asdict, fields
from pathlib import Path
from typing import Sequence

import pandas as pd

logger = logging.getLogger(__name__)


def _format_float(value) -> str:
    return repr(float(value))


def column_names(row_type) -> list[str]:
    """Dataclass field names in declaration order."""
    return [f.name for f in fields(row_type)]


def write_rows(rows: Sequence, row_type, path) -> Path:
    """
    Write dataclass rows to a UTF-8 CSV with a header row.

    Args:
        rows: instances of row_type (may be empty: header only)
        row_type: dataclass type defining the columns
        path: destination; parent directories are created

    Raises:
        OSError: if the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = pd.DataFrame([asdict(row) for row in rows], columns=column_names(row_type))
    frame.to_csv(
        path,
        index=False,
        float_format=_format_float,
        encoding="utf-8",
        lineterminator="\n",
    )
    logger.info(f"Wrote {len(frame)} row(s) to {path}")
    return path


def read_rows(path) -> pd.DataFrame:
    """Load a CSV written by write_rows with round-trip float parsing."""
    return pd.read_csv(path, float_precision="round_trip")
