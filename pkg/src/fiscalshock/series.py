"""Quarterly series container and deterministic transforms.

Dates are handled as integer quarter ordinals (``4 * year + quarter - 1``);
no calendar library is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _core
from .exceptions import DataError


def to_ordinal(year: int, quarter: int) -> int:
    if quarter not in (1, 2, 3, 4):
        raise DataError(f"quarter must be 1..4, got {quarter}")
    return 4 * int(year) + int(quarter) - 1


def from_ordinal(ordinal: int) -> tuple[int, int]:
    return ordinal // 4, ordinal % 4 + 1


def quarter_label(ordinal: int) -> str:
    year, q = from_ordinal(ordinal)
    return f"{year}Q{q}"


@dataclass(frozen=True, eq=False)
class QuarterlySeries:
    """A dated quarterly series of finite reals.

    Parameters
    ----------
    start : tuple of int
        ``(year, quarter)`` of the first observation.
    values : array_like
        Observations; stored as a read-only float array.
    name : str
        Identifier used for column names and file names.
    """

    start: tuple[int, int]
    values: np.ndarray
    name: str = "series"
    _ordinal: int = field(init=False, repr=False)

    def __post_init__(self):
        start = (int(self.start[0]), int(self.start[1]))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "_ordinal", to_ordinal(*start))
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size < 1:
            raise DataError(f"series '{self.name}' is empty")
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise DataError(
                f"series '{self.name}' has a non-finite value at {quarter_label(self._ordinal + bad[0])}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_ordinal(cls, ordinal: int, values, name: str = "series") -> "QuarterlySeries":
        return cls(from_ordinal(ordinal), values, name)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuarterlySeries):
            return NotImplemented
        return (
            self.start == other.start
            and self.name == other.name
            and len(self) == len(other)
            and bool(np.array_equal(self.values, other.values))
        )

    @property
    def first(self) -> int:
        """Ordinal of the first observation."""
        return self._ordinal

    @property
    def last(self) -> int:
        """Ordinal of the last observation."""
        return self._ordinal + len(self) - 1

    @property
    def end(self) -> tuple[int, int]:
        return from_ordinal(self.last)

    def label(self, t: int) -> str:
        return quarter_label(self._ordinal + t)

    def labels(self) -> list[str]:
        return [quarter_label(self._ordinal + t) for t in range(len(self))]

    def ordinals(self) -> np.ndarray:
        return np.arange(self.first, self.last + 1)

    def replace(self, values=None, name: str | None = None, first: int | None = None) -> "QuarterlySeries":
        return QuarterlySeries.from_ordinal(
            self.first if first is None else first,
            self.values if values is None else values,
            self.name if name is None else name,
        )

    def window(self, first: int, last: int) -> "QuarterlySeries":
        """Sub-series covering ordinals ``first..last`` inclusive."""
        if first < self.first or last > self.last or last < first:
            raise DataError(
                f"window {quarter_label(first)}-{quarter_label(last)} outside "
                f"'{self.name}' ({quarter_label(self.first)}-{quarter_label(self.last)})"
            )
        lo = first - self.first
        return self.replace(values=self.values[lo:lo + last - first + 1], first=first)

    def __repr__(self) -> str:
        return (
            f"QuarterlySeries(name={self.name!r}, {quarter_label(self.first)}-"
            f"{quarter_label(self.last)}, n={len(self)})"
        )


def deflate(nominal: QuarterlySeries, deflator: QuarterlySeries, base_year: int = 2005) -> QuarterlySeries:
    """Convert a nominal series to real terms.

    The deflator is rescaled so that its ``base_year`` annual average is 1,
    and ``real = nominal / rescaled_deflator``.
    """
    if nominal.first != deflator.first or len(nominal) != len(deflator):
        raise DataError(
            f"deflate: '{nominal.name}' and '{deflator.name}' cover different samples"
        )
    bad = np.flatnonzero(deflator.values <= 0)
    if bad.size:
        raise DataError(f"deflate: non-positive deflator value at {deflator.label(bad[0])}")
    base = [to_ordinal(base_year, q) for q in (1, 2, 3, 4)]
    in_base = [o - deflator.first for o in base if deflator.first <= o <= deflator.last]
    if not in_base:
        raise DataError(f"deflate: base year {base_year} is outside the deflator sample")
    level = deflator.values[in_base].mean()
    return nominal.replace(values=nominal.values / (deflator.values / level))


def transform_log(s: QuarterlySeries) -> QuarterlySeries:
    bad = np.flatnonzero(s.values <= 0)
    if bad.size:
        raise DataError(f"log of non-positive value in '{s.name}' at {s.label(bad[0])}")
    return s.replace(values=np.log(s.values))


def transform_diff(s: QuarterlySeries, order: int = 1) -> QuarterlySeries:
    """Difference ``order`` times; the start advances by ``order`` quarters."""
    if order < 1:
        raise DataError("difference order must be positive")
    if len(s) <= order:
        raise DataError(f"series '{s.name}' too short ({len(s)}) for differencing of order {order}")
    return s.replace(values=np.diff(s.values, n=order), first=s.first + order)


def align(series_list: Sequence[QuarterlySeries]) -> list[QuarterlySeries]:
    """Truncate every series to the common quarter range."""
    if not series_list:
        raise DataError("align: empty series list")
    first = max(s.first for s in series_list)
    last = min(s.last for s in series_list)
    if last < first:
        raise DataError("align: series have no quarters in common")
    return [s.window(first, last) for s in series_list]


@dataclass(frozen=True)
class LagMatrix:
    """Regressor matrix built from current and lagged values of aligned series.

    ``sample_start`` is the quarter ordinal of the first row.
    """

    data: np.ndarray
    columns: tuple[str, ...]
    sample_start: int

    @property
    def nobs(self) -> int:
        return self.data.shape[0]

    def target(self, s: QuarterlySeries) -> np.ndarray:
        """Values of ``s`` on the rows of this matrix."""
        return s.window(self.sample_start, self.sample_start + self.nobs - 1).values

    def with_constant(self, name: str = "C") -> "LagMatrix":
        data = np.column_stack([np.ones(self.nobs), self.data])
        return LagMatrix(data, (name,) + self.columns, self.sample_start)

    def hstack(self, other: "LagMatrix") -> "LagMatrix":
        if other.sample_start != self.sample_start or other.nobs != self.nobs:
            raise DataError("hstack: lag matrices cover different samples")
        return LagMatrix(np.column_stack([self.data, other.data]), self.columns + other.columns,
                         self.sample_start)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def lag_name(name: str, lag: int) -> str:
    return name if lag == 0 else f"{name}(-{lag})"


def build_lag_matrix(series_list, lags_per_series, include_current) -> LagMatrix:
    """Stack current values and lags ``1..L`` of each series.

    ``lags_per_series`` and ``include_current`` are given per series
    (scalars broadcast). The first ``max(lags)`` rows are dropped so that
    every row is complete.
    """
    series_list = list(series_list)
    k = len(series_list)
    if k == 0:
        raise DataError("build_lag_matrix: no series")
    lags = [int(lags_per_series)] * k if np.isscalar(lags_per_series) else [int(x) for x in lags_per_series]
    cur = [bool(include_current)] * k if np.isscalar(include_current) else [bool(x) for x in include_current]
    if len(lags) != k or len(cur) != k:
        raise DataError("build_lag_matrix: one lag count / current flag per series")
    if any(lag < 0 for lag in lags):
        raise DataError("build_lag_matrix: negative lag")
    first = series_list[0].first
    n = len(series_list[0])
    if any(s.first != first or len(s) != n for s in series_list):
        raise DataError("build_lag_matrix: series must be aligned")
    maxlag = max(lags)
    rows = n - maxlag
    if rows < 1:
        raise DataError(f"build_lag_matrix: {n} observations cannot support {maxlag} lags")
    cols, names = [], []
    for s, lag, c in zip(series_list, lags, cur):
        for j in range(0 if c else 1, lag + 1):
            cols.append(s.values[maxlag - j:n - j])
            names.append(lag_name(s.name, j))
    data = np.column_stack(cols) if cols else np.empty((rows, 0))
    return LagMatrix(data, tuple(names), first + maxlag)


def hp_filter(s: QuarterlySeries, lam: float = 1600.0) -> tuple[QuarterlySeries, QuarterlySeries]:
    """Hodrick-Prescott trend and cycle.

    The trend minimises ``sum (y - tau)^2 + lam * sum (second diff tau)^2``
    and is found from the pentadiagonal normal equations; ``cycle = y - trend``.
    """
    if len(s) < 4:
        raise DataError(f"hp_filter: series '{s.name}' needs at least 4 observations")
    if not lam >= 0:
        raise DataError("hp_filter: lambda must be non-negative")
    trend = _core.hp_trend(np.ascontiguousarray(s.values), float(lam))
    cycle = s.values - trend
    return s.replace(values=trend, name=f"{s.name}_trend"), s.replace(values=cycle, name=f"{s.name}_cycle")
