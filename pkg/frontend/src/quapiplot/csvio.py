"""Reading and validating the CSV tables produced by the quapidyn CLI.

The expected layout is one header row followed by numeric rows, comma
separated.  The first column must be the time axis ``t_fs``; every other
column is a named data series.  Files that do not match this shape raise
:class:`SchemaError` with a message naming the offending column or line,
so that a misconfigured pipeline fails loudly instead of producing an
empty plot.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TIME_COLUMN = "t_fs"


class SchemaError(ValueError):
    """A CSV file does not match the expected tabular schema."""


@dataclass(frozen=True)
class Table:
    """One parsed CSV file: a shared time axis plus named value columns."""

    name: str
    path: Path
    times: np.ndarray
    columns: dict[str, np.ndarray]

    def require(self, column: str) -> np.ndarray:
        if column not in self.columns:
            available = ", ".join(self.columns)
            raise SchemaError(
                f"{self.path}: column '{column}' not found; "
                f"available columns are: {available}"
            )
        return self.columns[column]


def _split_row(line: str) -> list[str]:
    return [cell.strip() for cell in line.split(",")]


def read_table(path: Path | str) -> Table:
    """Parse one CSV file, validating the header and every cell."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read file: {exc}") from exc

    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: file is empty")

    header = _split_row(lines[0])
    if header[0] != TIME_COLUMN:
        raise SchemaError(
            f"{path}: first column must be '{TIME_COLUMN}', "
            f"found columns: {', '.join(header)}"
        )
    if len(header) < 2:
        raise SchemaError(f"{path}: no data columns besides '{TIME_COLUMN}'")
    if len(set(header)) != len(header):
        raise SchemaError(f"{path}: duplicate column names in header: {', '.join(header)}")

    raw: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = _split_row(line)
        if len(cells) != len(header):
            raise SchemaError(
                f"{path}, line {lineno}: expected {len(header)} fields, "
                f"got {len(cells)}"
            )
        row = []
        for name, cell in zip(header, cells):
            try:
                row.append(float(cell))
            except ValueError:
                raise SchemaError(
                    f"{path}, line {lineno}, column '{name}': "
                    f"not a number: {cell!r}"
                ) from None
        raw.append(row)

    if not raw:
        raise SchemaError(f"{path}: header but no data rows")

    data = np.asarray(raw, dtype=float)
    columns = {name: data[:, j] for j, name in enumerate(header[1:], start=1)}
    return Table(name=path.stem, path=path, times=data[:, 0], columns=columns)


def read_overlay(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a two-column (time, value) CSV, with or without a header row."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read file: {exc}") from exc

    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: file is empty")

    first = _split_row(lines[0])
    if len(first) != 2:
        raise SchemaError(
            f"{path}: overlay files must have exactly two columns, "
            f"got {len(first)}: {', '.join(first)}"
        )
    try:
        float(first[0]), float(first[1])
        start = 0
    except ValueError:
        start = 1  # first row is a header

    times, values = [], []
    for lineno, line in enumerate(lines[start:], start=start + 1):
        cells = _split_row(line)
        if len(cells) != 2:
            raise SchemaError(
                f"{path}, line {lineno}: expected 2 fields, got {len(cells)}"
            )
        try:
            times.append(float(cells[0]))
            values.append(float(cells[1]))
        except ValueError:
            raise SchemaError(
                f"{path}, line {lineno}: not a numeric pair: {line.strip()!r}"
            ) from None

    if not times:
        raise SchemaError(f"{path}: header but no data rows")
    return np.asarray(times), np.asarray(values)
