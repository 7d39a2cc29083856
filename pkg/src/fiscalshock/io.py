"""Two-column quarterly CSV files (``DATE,<NAME>``, ISO dates at quarter starts)."""

from __future__ import annotations

import csv
import datetime as _dt
import os

import numpy as np

from .exceptions import DataError
from .series import QuarterlySeries, from_ordinal, to_ordinal

_QUARTER_MONTH = {1: 1, 4: 2, 7: 3, 10: 4}


def _parse_date(text: str, path, row: int) -> int:
    try:
        d = _dt.date.fromisoformat(text.strip())
    except ValueError:
        raise DataError(f"{path}: row {row}: malformed date {text!r}") from None
    if d.day != 1 or d.month not in _QUARTER_MONTH:
        raise DataError(f"{path}: row {row}: {text} is not a quarter start date (non-quarterly spacing)")
    return to_ordinal(d.year, _QUARTER_MONTH[d.month])


def load_fred_csv(path) -> QuarterlySeries:
    """Read a FRED-style quarterly file; ``"."`` or blank values are rejected."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None
    with fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if len(header) != 2 or header[0].upper() != "DATE" or not header[1]:
        raise DataError(f"{path}: header must be 'DATE,<NAME>', got {','.join(header)!r}")
    if len(rows) == 1:
        raise DataError(f"{path}: empty file (header only)")
    ords, vals = [], []
    for i, r in enumerate(rows[1:], start=2):
        if len(r) != 2:
            raise DataError(f"{path}: row {i}: expected 2 fields, got {len(r)}")
        o = _parse_date(r[0], path, i)
        txt = r[1].strip()
        if txt in ("", "."):
            raise DataError(f"{path}: row {i}: missing value")
        try:
            v = float(txt)
        except ValueError:
            raise DataError(f"{path}: row {i}: non-numeric value {txt!r}") from None
        if not np.isfinite(v):
            raise DataError(f"{path}: row {i}: non-finite value")
        if ords and o != ords[-1] + 1:
            raise DataError(f"{path}: row {i}: non-quarterly spacing after {r[0]}")
        ords.append(o)
        vals.append(v)
    return QuarterlySeries.from_ordinal(ords[0], np.array(vals), header[1])


def quarter_start_date(ordinal: int) -> str:
    y, q = from_ordinal(ordinal)
    return f"{y:04d}-{3 * (q - 1) + 1:02d}-01"


def write_fred_csv(s: QuarterlySeries, path, name: str | None = None) -> None:
    """Write with ``%.17g`` so values round-trip exactly."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"DATE,{name or s.name}\n")
        for o, v in zip(s.ordinals(), s.values):
            fh.write(f"{quarter_start_date(int(o))},{float(v):.17g}\n")
