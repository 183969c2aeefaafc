"""Utilities to load and write tabulated oracles as CSV.

This module provides:
- load_table(csv_path, field, num_x, num_y): a `SampleTable` from CSV
- save_table(table, csv_path): write a table back in the same layout
- load_points(csv_path, field, dim): explicit sampler points from CSV

Columns are ``x1..xm, y1..yk, value``. Cells are exact literals (``7``,
``-3/4``); over F_p they are reduced modulo p. Everything is read as text
so no value passes through a float.
"""
from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from core.exceptions import ConfigurationError, ValidationError
from core.logger import get_logger
from services.oracle import SampleTable, TableOracle
from services.scalar import FieldDesc

logger = get_logger("data.sample_tables")

PathLike = Union[str, Path]


def _read_text_frame(csv_path: PathLike) -> pd.DataFrame:
    path = Path(csv_path)
    if not path.is_file():
        raise ConfigurationError(f"table file not found: {path}", config_key="table")
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    return df.rename(columns=lambda s: s.strip())


def _infer_arity(columns: List[str], prefix: str) -> int:
    count = 0
    while f"{prefix}{count + 1}" in columns:
        count += 1
    return count


def load_table(
    csv_path: PathLike,
    field: FieldDesc,
    num_x: Optional[int] = None,
    num_y: Optional[int] = None,
) -> SampleTable:
    """Parse a CSV table into exact graph pairs.

    Args:
        csv_path: Path to the CSV file.
        field: Field the cells are parsed in.
        num_x: Expected number of x columns (inferred from the header if omitted).
        num_y: Expected number of y columns (inferred if omitted).

    Raises:
        ConfigurationError: Missing file or columns.
        ValidationError: A cell is not an exact literal or points repeat.
    """
    logger.info("Loading table: %s", csv_path)
    df = _read_text_frame(csv_path)
    columns = list(df.columns)
    num_x = _infer_arity(columns, "x") if num_x is None else num_x
    num_y = _infer_arity(columns, "y") if num_y is None else num_y
    wanted = [f"x{i}" for i in range(1, num_x + 1)] + [f"y{i}" for i in range(1, num_y + 1)]
    missing = [c for c in wanted + ["value"] if c not in columns]
    if missing:
        raise ConfigurationError(f"table is missing columns {missing}", config_key="table")

    rows = []
    for line, record in enumerate(df[wanted + ["value"]].itertuples(index=False), start=2):
        try:
            cells = [field.parse_value(str(v)) for v in record]
        except ValidationError as exc:
            raise ValidationError(f"line {line}: {exc.message}", field="table")
        rows.append((tuple(cells[:-1]), cells[-1]))
    logger.info("Loaded %s table rows over %s", len(rows), field)
    return SampleTable(num_x, num_y, field, tuple(rows))


def load_table_oracle(csv_path: PathLike, field: FieldDesc, num_x: Optional[int] = None, num_y: Optional[int] = None) -> TableOracle:
    return TableOracle(load_table(csv_path, field, num_x, num_y), source=str(csv_path))


def save_table(table: SampleTable, csv_path: PathLike) -> Path:
    """Write `table` as CSV with exact literals; returns the path written."""
    names = [f"x{i}" for i in range(1, table.num_x + 1)] + [f"y{i}" for i in range(1, table.num_y + 1)]
    fmt = table.field.format_value
    records = [[fmt(c) for c in point] + [fmt(value)] for point, value in table.rows]
    path = Path(csv_path)
    pd.DataFrame(records, columns=names + ["value"]).to_csv(path, index=False)
    return path


def load_points(csv_path: PathLike, field: FieldDesc, dim: int) -> List[tuple]:
    """Read sampler points from the first `dim` x-columns (or all columns named x1..)."""
    df = _read_text_frame(csv_path)
    wanted = [f"x{i}" for i in range(1, dim + 1)]
    if any(c not in df.columns for c in wanted):
        wanted = list(df.columns[:dim])
    if len(wanted) < dim:
        raise ConfigurationError(f"point file has fewer than {dim} columns", config_key="sampler")
    return [tuple(field.parse_value(str(v)) for v in record) for record in df[wanted].itertuples(index=False)]
