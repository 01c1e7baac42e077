"""CSV reading and writing shared by the library types and the CLI.

Output files may carry ``# key=value`` comment headers (the CLI uses them
to embed the resolved config hash); readers here skip such lines.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .exceptions import ValidationError


def write_csv(path, columns, rows, header_lines=()) -> None:
    """Write ``rows`` (iterables of pre-formatted strings) under ``columns``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_series_csv(path) -> np.ndarray:
    """Read a one-value-per-line series CSV.

    Accepts an optional header row and an optional leading timestamp
    column.  Timestamps are only checked for monotonicity (numeric or
    lexicographic) and then dropped; the series is treated as uniformly
    sampled.
    """
    path = Path(path)
    rows: list[list[str]] = []
    with path.open(newline="") as fh:
        for raw in csv.reader(fh):
            cells = [c.strip() for c in raw if c.strip() != ""]
            if not cells or cells[0].startswith("#"):
                continue
            rows.append(cells)
    if not rows:
        raise ValidationError(f"{path} contains no data rows")
    if not _is_number(rows[0][-1]):  # header row
        rows = rows[1:]
        if not rows:
            raise ValidationError(f"{path} contains only a header")

    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValidationError(f"{path} has rows of inconsistent width")
    if width > 2:
        raise ValidationError(f"{path} must have one value column (plus optional timestamp)")

    if width == 2:
        stamps = [r[0] for r in rows]
        if all(_is_number(s) for s in stamps):
            numeric = np.array([float(s) for s in stamps])
            ordered = bool(np.all(np.diff(numeric) >= 0))
        else:
            ordered = all(a <= b for a, b in zip(stamps, stamps[1:]))
        if not ordered:
            raise ValidationError(f"timestamp column in {path} is not monotonically increasing")

    try:
        values = np.array([float(r[-1]) for r in rows])
    except ValueError as exc:
        raise ValidationError(f"non-numeric value in {path}: {exc}") from exc
    return values
