"""Grouping, aggregation, and chart-series construction.

Bar, pie, and frequency-polygon payloads plus per-department statistics,
all as plain data the HTTP layer can serialize directly. Mixed-unit groups
are partitioned into one chart per unit, never converted: there is no
credible TMF/kg conversion across heterogeneous minerals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateError, EmptyError, UnknownDepartmentError
from .ingest import ProductionRecord, fold_name, normalize_label

GROUP_FIELDS = ("mineral", "department", "year", "stratum", "stage")

# pie slices under this share of the total collapse into one OTROS slice
OTHER_SHARE = 1.0


class ChartKind(str, Enum):
    BAR = "Bar"
    PIE = "Pie"
    FREQUENCY_POLYGON = "FrequencyPolygon"


@dataclass(frozen=True)
class ChartSeries:
    """One renderable chart payload: paired labels and values."""

    kind: ChartKind
    labels: tuple
    values: tuple
    unit: str = ""
    title: str = ""

    def __post_init__(self):
        if len(self.labels) != len(self.values):
            raise ValueError("labels and values must pair up")
        for v in self.values:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"chart values must be finite and >= 0, got {v}")
        if self.kind == ChartKind.PIE and self.values:
            s = float(sum(self.values))
            if abs(s - 100.0) > 1e-6:
                raise ValueError(f"pie shares must sum to 100, got {s!r}")
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "labels": list(self.labels),
            "values": list(self.values),
            "unit": self.unit,
            "title": self.title,
        }


@dataclass(frozen=True)
class DepartmentStats:
    """Summary behind one department's map popup."""

    department: str
    total_by_mineral: dict
    top_mineral: str
    record_count: int
    years_covered: tuple

    def __post_init__(self):
        if self.record_count < 1:
            raise ValueError("a department summary needs at least one record")

    def to_dict(self) -> dict:
        return {
            "department": self.department,
            "total_by_mineral": {
                name: {"quantity": float(q), "unit": unit}
                for name, (q, unit) in sorted(self.total_by_mineral.items())
            },
            "top_mineral": self.top_mineral,
            "record_count": int(self.record_count),
            "years_covered": list(self.years_covered),
        }


def _measure(rec: ProductionRecord) -> float:
    # totals are recomputed during imputation; fall back for raw records
    return float(rec.total) if rec.total is not None else rec.month_sum()


def _group_label(rec: ProductionRecord, group_by: str) -> str:
    if group_by not in GROUP_FIELDS:
        raise ValueError(f"group_by must be one of {GROUP_FIELDS}, got {group_by!r}")
    return str(getattr(rec, group_by))


def _sorted_groups(totals: dict) -> list:
    return sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))


def aggregate(records: Sequence[ProductionRecord], group_by: str
              ) -> list[ChartSeries]:
    """Bar chart of summed totals per group value, descending.

    Returns one ChartSeries per distinct unit among the records (a single
    entry for single-unit data), each sorted descending by value with ties
    broken alphabetically.
    """
    if not records:
        raise EmptyError("no records to aggregate")
    by_unit: dict[str, dict[str, float]] = {}
    for rec in records:
        label = _group_label(rec, group_by)
        totals = by_unit.setdefault(rec.unit, {})
        totals[label] = totals.get(label, 0.0) + _measure(rec)
    out = []
    for unit in sorted(by_unit):
        pairs = _sorted_groups(by_unit[unit])
        out.append(ChartSeries(
            kind=ChartKind.BAR,
            labels=tuple(label for label, _ in pairs),
            values=tuple(value for _, value in pairs),
            unit=unit,
            title=f"Total by {group_by}" + (f" ({unit})" if unit else ""),
        ))
    return out


def pie(records: Sequence[ProductionRecord], group_by: str,
        other_share: float = OTHER_SHARE) -> ChartSeries:
    """Percentage shares per group value; slices under other_share% merge
    into an OTROS slice placed last."""
    if not records:
        raise EmptyError("no records to aggregate")
    totals: dict[str, float] = {}
    for rec in records:
        label = _group_label(rec, group_by)
        totals[label] = totals.get(label, 0.0) + _measure(rec)
    grand = sum(totals.values())
    if grand <= 0.0:
        raise DegenerateError("grand total is zero; shares are undefined")
    shares = {label: 100.0 * v / grand for label, v in totals.items()}
    kept = [(label, s) for label, s in _sorted_groups(shares) if s >= other_share]
    other = sum(s for s in shares.values() if s < other_share)
    labels = [label for label, _ in kept]
    values = [s for _, s in kept]
    if other > 0.0:
        labels.append("OTROS")
        values.append(other)
    # renormalize away the last few ulps so the sum lands exactly on 100
    s = sum(values)
    values = [100.0 * v / s for v in values]
    units = {rec.unit for rec in records}
    return ChartSeries(
        kind=ChartKind.PIE,
        labels=tuple(labels),
        values=tuple(values),
        unit=units.pop() if len(units) == 1 else "",
        title=f"Share by {group_by}",
    )


def frequency_polygon(values: Sequence[float], bins: Optional[int] = None
                      ) -> ChartSeries:
    """Histogram counts as a closed polygon.

    Bins default to Sturges' rule, ceil(1 + log2 n), spanning [min, max]
    with equal widths. Labels are bin midpoints; the first and last points
    are zero-count half-bin endpoints so the outline returns to the axis.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise EmptyError("no values to bin")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    lo, hi = float(arr.min()), float(arr.max())
    if arr.size < 2 or hi <= lo:
        raise DegenerateError("need at least two values with positive spread")
    if bins is None:
        bins = math.ceil(1.0 + math.log2(arr.size))
    if not isinstance(bins, int) or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins!r}")
    counts, edges = np.histogram(arr, bins=bins, range=(lo, hi))
    width = (hi - lo) / bins
    mids = [lo - width / 2.0] + [float((edges[i] + edges[i + 1]) / 2.0)
                                 for i in range(bins)] + [hi + width / 2.0]
    polygon = [0.0] + [float(c) for c in counts] + [0.0]
    return ChartSeries(
        kind=ChartKind.FREQUENCY_POLYGON,
        labels=tuple(f"{m:.10g}" for m in mids),
        values=tuple(polygon),
        unit="",
        title="Frequency distribution",
    )


def department_stats(records: Sequence[ProductionRecord], department: str
                     ) -> DepartmentStats:
    """Totals per mineral, the dominant unit's top mineral, and year span."""
    wanted = fold_name(department)
    matched = [r for r in records if fold_name(r.department) == wanted]
    if not matched:
        raise UnknownDepartmentError(
            f"no records for department {normalize_label(department)!r}")

    by_pair: dict[tuple[str, str], float] = {}
    pair_counts: dict[tuple[str, str], int] = {}
    unit_counts: dict[str, int] = {}
    for rec in matched:
        key = (rec.mineral, rec.unit)
        by_pair[key] = by_pair.get(key, 0.0) + _measure(rec)
        pair_counts[key] = pair_counts.get(key, 0) + 1
        unit_counts[rec.unit] = unit_counts.get(rec.unit, 0) + 1

    # a mineral reported in two units keeps its better-attested unit
    total_by_mineral: dict[str, tuple[float, str]] = {}
    best_pair: dict[str, tuple[int, str]] = {}
    for (mineral, unit), count in pair_counts.items():
        rank = (-count, unit)
        if mineral not in best_pair or rank < best_pair[mineral]:
            best_pair[mineral] = rank
            total_by_mineral[mineral] = (by_pair[(mineral, unit)], unit)

    dominant_unit = min(unit_counts, key=lambda u: (-unit_counts[u], u))
    in_class = [(name, q) for name, (q, unit) in total_by_mineral.items()
                if unit == dominant_unit]
    if not in_class:  # every dominant-unit mineral kept a better-attested unit
        in_class = [(name, q) for name, (q, _) in total_by_mineral.items()]
    top_mineral = min(in_class, key=lambda kv: (-kv[1], kv[0]))[0]

    years = [r.year for r in matched]
    return DepartmentStats(
        department=normalize_label(matched[0].department),
        total_by_mineral=total_by_mineral,
        top_mineral=top_mineral,
        record_count=len(matched),
        years_covered=(min(years), max(years)),
    )
