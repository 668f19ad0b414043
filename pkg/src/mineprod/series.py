"""Time-series container and the array primitives built on top of it."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence

import numpy as np

from .errors import AnchorError, DegenerateError, LagError, LengthError


class Frequency(IntEnum):
    ANNUAL = 1
    MONTHLY = 12


def advance(start: tuple[int, int], periods: int, frequency: int) -> tuple[int, int]:
    """Move a (year, month) time point forward by `periods` steps."""
    year, month = start
    if frequency == Frequency.ANNUAL:
        return year + periods, month
    total = (year * 12 + (month - 1)) + periods
    return total // 12, total % 12 + 1


def format_point(point: tuple[int, int], frequency: int) -> str:
    year, month = point
    if frequency == Frequency.ANNUAL:
        return f"{year:04d}"
    return f"{year:04d}-{month:02d}"


@dataclass(frozen=True)
class TimeSeries:
    """Evenly spaced observations with a calendar start and a unit label.

    values are stored as a read-only float64 array; gaps are not allowed
    here (imputation happens upstream, on the record level).
    """

    values: np.ndarray
    start: tuple[int, int] = (2000, 1)
    frequency: int = Frequency.MONTHLY
    unit: str = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise LengthError("a series needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series values must be finite")
        freq = int(self.frequency)
        if freq not in (Frequency.ANNUAL, Frequency.MONTHLY):
            raise ValueError(f"frequency must be 1 or 12, got {self.frequency}")
        year, month = self.start
        if not 1 <= int(month) <= 12:
            raise ValueError(f"start month out of range: {month}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start", (int(year), int(month)))
        object.__setattr__(self, "frequency", freq)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> tuple[int, int]:
        return advance(self.start, self.n - 1, self.frequency)

    def span(self) -> tuple[str, str]:
        return (format_point(self.start, self.frequency),
                format_point(self.end, self.frequency))

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "start": list(self.start),
            "frequency": int(self.frequency),
            "unit": self.unit,
        }


def difference(series: TimeSeries, d: int) -> TimeSeries:
    """Apply d rounds of first differencing."""
    if not isinstance(d, int) or d < 0:
        raise ValueError(f"differencing order must be a nonnegative integer, got {d}")
    if series.n <= d:
        raise LengthError(
            f"series of length {series.n} cannot be differenced {d} times"
        )
    vals = series.values
    for _ in range(d):
        vals = vals[1:] - vals[:-1]
    return TimeSeries(vals, advance(series.start, d, series.frequency),
                      series.frequency, series.unit)


def inverse_difference(diffed: TimeSeries, anchors: Sequence[float], d: int) -> TimeSeries:
    """Undo d rounds of differencing.

    anchors are the last d values of the original series immediately before
    the differenced segment. The result has the same length and time span as
    `diffed` and reproduces the original tail exactly when the anchors come
    from a genuine difference() round trip.
    """
    anchors = np.asarray(anchors, dtype=float)
    if anchors.ndim != 1 or anchors.size != d:
        raise AnchorError(f"need exactly {d} anchor values, got {anchors.size}")
    if d == 0:
        return diffed
    # anchor value at each differencing depth: depth k holds the last
    # available k-th difference just before the segment starts
    levels = [anchors]
    for _ in range(1, d):
        levels.append(np.diff(levels[-1]))
    vals = diffed.values
    for k in range(d - 1, -1, -1):
        vals = levels[k][-1] + np.cumsum(vals)
    return TimeSeries(vals, diffed.start, diffed.frequency, diffed.unit)


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    values: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "lags", np.asarray(self.lags, dtype=int))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def acf(series: TimeSeries, max_lag: int) -> AcfResult:
    """Sample autocorrelations at lags 1..max_lag, biased denominator n."""
    n = series.n
    if not isinstance(max_lag, int) or max_lag < 1:
        raise LagError(f"max_lag must be a positive integer, got {max_lag}")
    if max_lag >= n:
        raise LagError(f"max_lag {max_lag} must be below the series length {n}")
    x = series.values - series.values.mean()
    c0 = float(np.dot(x, x)) / n
    if c0 <= 0.0:
        raise DegenerateError("autocorrelation of a constant series is undefined")
    vals = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        vals[k - 1] = float(np.dot(x[k:], x[:-k])) / n / c0
    return AcfResult(np.arange(1, max_lag + 1), vals, n)


def znormalize(values: Sequence) -> np.ndarray:
    """Center and scale to unit population variance, ignoring NaN gaps.

    Gaps stay NaN in the output. A zero-spread input maps to all zeros
    (gaps aside) rather than dividing by zero.
    """
    arr = np.array([np.nan if v is None else float(v) for v in values], dtype=float)
    mask = np.isfinite(arr)
    if not mask.any():
        raise DegenerateError("cannot normalize a fully missing vector")
    obs = arr[mask]
    mu = float(obs.mean())
    sd = float(obs.std())  # population convention, divisor n
    out = np.full(arr.shape, np.nan)
    if sd == 0.0:
        out[mask] = 0.0
    else:
        out[mask] = (obs - mu) / sd
    return out
