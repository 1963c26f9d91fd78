"""CSV exchange with external evaluators.

Dialect: UTF-8, comma separated, '.' decimal point, no thousands
separators, header ``x1,...,xm[,y]``. Floats are written with ``repr`` (the
shortest string that round-trips), so emit followed by ingest is lossless.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import List, Sequence

import numpy as np

from .design import DesignSpace, SampleSet
from .errors import BoundsViolationError, DataError, EmptySampleError


def format_float(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise DataError(f"cannot write non-finite value {v}")
    return repr(v)


def _parse(cell: str, line: int, col: int) -> float:
    text = cell.strip()
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"line {line}, column {col}: {cell!r} is not a number") from None
    # float() accepts things the dialect forbids
    if "_" in text or not math.isfinite(v):
        raise DataError(f"line {line}, column {col}: {cell!r} is not a finite plain number")
    return v


def read_table(path) -> tuple:
    """Header and numeric rows of a dialect-conforming CSV file."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from None
    if not rows:
        raise EmptySampleError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} fields, found {len(row)}")
        body.append((lineno, [_parse(c, lineno, j + 1) for j, c in enumerate(row)]))
    return header, body


def ingest_csv(path, space: DesignSpace, require_y: bool = True) -> SampleSet:
    """Read ``x1..xm[,y]`` rows and check them against ``space``."""
    header, body = read_table(path)
    m = space.m
    expected_x = [f"x{i}" for i in range(1, m + 1)]
    has_y = header[-1:] == ["y"]
    x_header = header[:-1] if has_y else header
    if len(x_header) != m:
        raise DataError(f"file has {len(x_header)} design columns but the bounds describe {m}")
    if x_header != expected_x:
        raise DataError(f"header must be {','.join(expected_x + ['y'])}, got {','.join(header)}")
    if require_y and not has_y:
        raise DataError("file has no y column")
    if not body:
        raise EmptySampleError(f"{path} has no data rows")
    data = np.array([vals for _, vals in body])
    X = data[:, :m]
    inside = space.contains(X)
    if not np.all(inside):
        lines = [body[i][0] for i in np.flatnonzero(~inside)]
        raise BoundsViolationError(f"rows outside bounds at lines {lines}")
    return SampleSet(X, data[:, m] if has_y else None)


def write_table(path, header: Sequence[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) for v in row])
    return path


def emit_design_csv(samples: SampleSet, path) -> Path:
    header: List[str] = [f"x{i}" for i in range(1, samples.m + 1)]
    data = samples.X
    if samples.y is not None:
        header.append("y")
        data = np.column_stack([samples.X, samples.y])
    return write_table(path, header, data)


def read_bounds_csv(path) -> DesignSpace:
    """Bounds file: header ``lower,upper``, one row per dimension."""
    header, body = read_table(path)
    if header != ["lower", "upper"]:
        raise DataError("bounds file header must be lower,upper")
    if not body:
        raise EmptySampleError(f"{path} has no bounds rows")
    arr = np.array([vals for _, vals in body])
    return DesignSpace(arr[:, 0], arr[:, 1])


def reduced_header(n: int) -> List[str]:
    return [f"x_r{i}" for i in range(1, n + 1)] + ["y"]


def read_reduced_csv(path) -> tuple:
    """Return (reduced coordinates k x n, y) from a ``x_r1[,x_r2],y`` file."""
    header, body = read_table(path)
    n = len(header) - 1
    if n < 1 or header != reduced_header(n):
        raise DataError(f"reduced file header must look like {','.join(reduced_header(1))}")
    if not body:
        raise EmptySampleError(f"{path} has no data rows")
    data = np.array([vals for _, vals in body])
    return data[:, :n], data[:, n]


def read_eigen_csv(path) -> np.ndarray:
    header, body = read_table(path)
    if header[:2] != ["index", "eigenvalue"]:
        raise DataError("eigenvalue file header must start with index,eigenvalue")
    return np.array([vals[1] for _, vals in body])
