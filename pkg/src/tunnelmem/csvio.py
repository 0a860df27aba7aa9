"""CSV reading and writing for traces and reference data."""

from __future__ import annotations

import csv

import numpy as np

from .metrics import ReferenceTrace
from .transient import TRACE_COLUMNS, Trace

REFERENCE_COLUMNS = ("t", "v", "i")


def _fmt(x):
    return "%.17g" % x


def write_trace(trace: Trace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    cols = [trace.column(c) for c in TRACE_COLUMNS]
    for row in zip(*cols):
        w.writerow([_fmt(x) for x in row])


def write_reference(ref, fh) -> None:
    """Write the (t, v, i) projection of a trace or reference."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REFERENCE_COLUMNS)
    for row in zip(ref.t, ref.v, ref.i):
        w.writerow([_fmt(x) for x in row])


def _read_columns(path, required):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in required]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(row[k]) for k in idx])
            except (ValueError, IndexError):
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def read_reference(path) -> ReferenceTrace:
    """Load ``t,v,i`` columns; any other columns (e.g. of a full trace) are ignored."""
    arr = _read_columns(path, REFERENCE_COLUMNS)
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValueError(f"{path}: t must be strictly increasing")
    return ReferenceTrace(arr[:, 0], arr[:, 1], arr[:, 2])


def read_trace(path) -> Trace:
    return Trace.from_rows(_read_columns(path, TRACE_COLUMNS))
