"""MINEM-style production table ingestion.

Parses the monthly (per-holder, 21 columns) and annual (year by mineral)
CSV extracts into typed records, normalizes the Spanish names, fills month
gaps by k-nearest-neighbor imputation, and assembles monthly time series.

Records are immutable; every cleaning step returns fresh records plus a
CleaningReport describing what was read, dropped, corrected, or imputed.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import re
import unicodedata
from dataclasses import dataclass, field, replace
from datetime import date
from typing import BinaryIO, Optional, Sequence, Union

import numpy as np

from .errors import (
    DuplicateYearError,
    EmptySelectionError,
    EncodingError,
    KError,
    MixedUnitError,
    NoDonorError,
    SchemaError,
)
from .series import Frequency, TimeSeries, advance, znormalize

log = logging.getLogger(__name__)

MONTH_COLUMNS = ("Enero", "Febrero", "Marzo", "Abril", "Mayo", "Junio", "Julio",
                 "Agosto", "Septiembre", "Octubre", "Noviembre", "Diciembre")
MONTHLY_COLUMNS = ("Mineral", "Unidad de medida", "Etapa", "Proceso", "Estrato",
                   "Titular", "Departamento", "Año") + MONTH_COLUMNS + ("Total",)
YEAR_COLUMN = "AÑO"

GAP_TOKENS = frozenset({"", "NA", "N/A", "-"})

# thousands-separated form like 1,234,567.89 (commas in groups of three)
_THOUSANDS = re.compile(r"-?\d{1,3}(?:,\d{3})+(?:\.\d+)?")

_ACCENT_MAP = str.maketrans("ÁÉÍÓÚÜáéíóúü", "AEIOUUaeiouu")


def normalize_label(name: str) -> str:
    """Uppercase, strip accents (Ñ kept), trim and collapse whitespace."""
    out = " ".join(str(name).translate(_ACCENT_MAP).split())
    return out.upper()


def fold_name(name: str) -> str:
    """Matching key: normalized further with Ñ folded to N."""
    return normalize_label(name).replace("Ñ", "N")


@dataclass(frozen=True)
class ProductionRecord:
    """One holder-level row of the monthly production table."""

    mineral: str
    unit: str
    stage: str
    process: str
    stratum: str
    holder: str
    department: str
    year: int
    months: tuple  # 12 entries, float or None
    total: Optional[float] = None

    def __post_init__(self):
        if not 1900 <= self.year <= date.today().year:
            raise ValueError(f"year out of range: {self.year}")
        if len(self.months) != 12:
            raise ValueError(f"need 12 month values, got {len(self.months)}")
        for v in self.months:
            if v is not None and (not math.isfinite(v) or v < 0.0):
                raise ValueError(f"month values must be finite and >= 0, got {v}")
        if self.total is not None and (not math.isfinite(self.total) or self.total < 0.0):
            raise ValueError(f"total must be finite and >= 0, got {self.total}")
        object.__setattr__(self, "months", tuple(self.months))

    @property
    def has_gaps(self) -> bool:
        return any(v is None for v in self.months)

    def month_sum(self) -> float:
        return float(sum(v for v in self.months if v is not None))

    def to_dict(self) -> dict:
        return {
            "mineral": self.mineral, "unit": self.unit, "stage": self.stage,
            "process": self.process, "stratum": self.stratum,
            "holder": self.holder, "department": self.department,
            "year": self.year,
            "months": [None if v is None else float(v) for v in self.months],
            "total": None if self.total is None else float(self.total),
        }


@dataclass(frozen=True)
class AnnualRecord:
    """One year of the annual production table: mineral -> (quantity, unit)."""

    year: int
    quantities: dict

    def __post_init__(self):
        for name, (value, unit) in self.quantities.items():
            if value is not None and (not math.isfinite(value) or value < 0.0):
                raise ValueError(f"{name} quantity must be >= 0, got {value}")

    def to_dict(self) -> dict:
        return {
            "year": self.year,
            "quantities": {
                name: {"value": None if v is None else float(v), "unit": unit}
                for name, (v, unit) in self.quantities.items()
            },
        }


@dataclass(frozen=True)
class Notice:
    row: Optional[int]
    column: str
    action: str

    def to_dict(self) -> dict:
        return {"row": self.row, "column": self.column, "action": self.action}


@dataclass
class CleaningReport:
    """What a cleaning step read, dropped, corrected, and imputed."""

    rows_read: int = 0
    rows_dropped: int = 0
    names_corrected: int = 0
    values_imputed: int = 0
    messages: list = field(default_factory=list)

    @property
    def rows_kept(self) -> int:
        return self.rows_read - self.rows_dropped

    def note(self, row: Optional[int], column: str, action: str) -> None:
        self.messages.append(Notice(row, column, action))

    def merged_with(self, other: "CleaningReport") -> "CleaningReport":
        """Chain a downstream stage's report onto this one.

        rows_read stays the upstream figure: the later stage only saw rows
        this one kept, so summing would double count.
        """
        return CleaningReport(
            rows_read=self.rows_read,
            rows_dropped=self.rows_dropped + other.rows_dropped,
            names_corrected=self.names_corrected + other.names_corrected,
            values_imputed=self.values_imputed + other.values_imputed,
            messages=self.messages + other.messages,
        )

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_dropped": self.rows_dropped,
            "names_corrected": self.names_corrected,
            "values_imputed": self.values_imputed,
            "messages": [m.to_dict() for m in self.messages],
        }


def _decode(source: Union[bytes, BinaryIO, str]) -> str:
    if isinstance(source, str):
        data = source.encode("utf-8")
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8: {exc}") from exc


def _sniff_delimiter(header_line: str) -> str:
    return ";" if header_line.count(";") > header_line.count(",") else ","


def _parse_number(cell: str) -> Optional[float]:
    s = cell.strip()
    if s in GAP_TOKENS:
        return None
    if _THOUSANDS.fullmatch(s):
        s = s.replace(",", "")
    return float(s)


def _reader(text: str):
    lines = text.splitlines()
    if not lines:
        raise SchemaError("input file is empty")
    delim = _sniff_delimiter(lines[0])
    return csv.reader(io.StringIO(text), delimiter=delim)


def _header_index(header: Sequence[str], required: Sequence[str]) -> dict:
    folded = {}
    for i, cell in enumerate(header):
        key = fold_name(cell)
        if key not in folded:
            folded[key] = i
    missing = [name for name in required if fold_name(name) not in folded]
    if missing:
        raise SchemaError(f"missing required columns: {', '.join(missing)}")
    return {name: folded[fold_name(name)] for name in required}


def parse_monthly(source, format_options: Optional[dict] = None
                  ) -> tuple[list[ProductionRecord], CleaningReport]:
    """Parse the 21-column monthly production CSV.

    Rows with an unparseable year or with every month cell empty are dropped
    and logged. Month cells accept thousands separators; "", "NA", "N/A" and
    "-" are gaps.
    """
    del format_options  # reserved; delimiter and gaps are auto-handled
    text = _decode(source)
    rows = list(_reader(text))
    idx = _header_index(rows[0], MONTHLY_COLUMNS)
    report = CleaningReport()
    records: list[ProductionRecord] = []

    def cell(row, name):
        j = idx[name]
        return row[j] if j < len(row) else ""

    for rno, row in enumerate(rows[1:], start=1):
        if not any(c.strip() for c in row):
            continue  # blank line, not a data row
        report.rows_read += 1
        try:
            year = int(cell(row, "Año").strip())
        except ValueError:
            report.rows_dropped += 1
            report.note(rno, "Año", "dropped: unparseable year")
            continue
        months = []
        bad_cell = None
        for name in MONTH_COLUMNS:
            raw = cell(row, name)
            try:
                months.append(_parse_number(raw))
            except ValueError:
                months.append(None)
                if bad_cell is None:
                    bad_cell = name
                report.note(rno, name, f"unparseable value {raw.strip()!r} treated as gap")
        if all(v is None for v in months):
            report.rows_dropped += 1
            report.note(rno, "Enero..Diciembre", "dropped: no month values")
            continue
        try:
            total = _parse_number(cell(row, "Total"))
        except ValueError:
            total = None
            report.note(rno, "Total", "unparseable total treated as missing")
        try:
            rec = ProductionRecord(
                mineral=cell(row, "Mineral").strip(),
                unit=cell(row, "Unidad de medida").strip(),
                stage=cell(row, "Etapa").strip(),
                process=cell(row, "Proceso").strip(),
                stratum=cell(row, "Estrato").strip(),
                holder=cell(row, "Titular").strip(),
                department=cell(row, "Departamento").strip(),
                year=year,
                months=tuple(months),
                total=total,
            )
        except ValueError as exc:
            report.rows_dropped += 1
            report.note(rno, "", f"dropped: {exc}")
            continue
        records.append(rec)
    return records, report


_ANNUAL_COL = re.compile(r"^\s*(.+?)\s*\(\s*([^()]*)\s*\)\s*$")


def parse_annual(source) -> list[AnnualRecord]:
    """Parse the annual table: AÑO column plus MINERAL(UNIT) columns."""
    text = _decode(source)
    rows = list(_reader(text))
    header = rows[0]
    year_col = None
    minerals = []  # (column index, mineral name, unit)
    for i, cellv in enumerate(header):
        if fold_name(cellv) == fold_name(YEAR_COLUMN):
            if year_col is None:
                year_col = i
            continue
        if not cellv.strip():
            continue
        m = _ANNUAL_COL.match(cellv)
        if m:
            minerals.append((i, normalize_label(m.group(1)), m.group(2).strip().upper()))
        else:
            minerals.append((i, normalize_label(cellv), ""))
    if year_col is None:
        raise SchemaError(f"missing required columns: {YEAR_COLUMN}")
    records = []
    seen = set()
    for rno, row in enumerate(rows[1:], start=1):
        if not any(c.strip() for c in row):
            continue
        raw_year = row[year_col] if year_col < len(row) else ""
        try:
            year = int(raw_year.strip())
        except ValueError as exc:
            raise SchemaError(f"row {rno}: unparseable year {raw_year!r}") from exc
        if year in seen:
            raise DuplicateYearError(f"year {year} appears more than once")
        seen.add(year)
        quantities = {}
        for i, name, unit in minerals:
            raw = row[i] if i < len(row) else ""
            try:
                value = _parse_number(raw)
            except ValueError as exc:
                raise SchemaError(f"row {rno}, column {name}: bad value {raw!r}") from exc
            quantities[name] = (value, unit)
        try:
            records.append(AnnualRecord(year=year, quantities=quantities))
        except ValueError as exc:
            raise SchemaError(f"row {rno}: {exc}") from exc
    records.sort(key=lambda r: r.year)
    return records


def normalize_names(records: Sequence[ProductionRecord]
                    ) -> tuple[list[ProductionRecord], CleaningReport]:
    """Normalize department and mineral names; count actual corrections."""
    report = CleaningReport(rows_read=len(records))
    out = []
    for i, rec in enumerate(records):
        changes = {}
        for fieldname in ("mineral", "department"):
            old = getattr(rec, fieldname)
            new = normalize_label(old)
            if new != old:
                changes[fieldname] = new
                report.names_corrected += 1
                report.note(i, fieldname, f"normalized {old!r} -> {new!r}")
        out.append(replace(rec, **changes) if changes else rec)
    return out, report


def _month_matrix(records: Sequence[ProductionRecord]) -> np.ndarray:
    mat = np.full((len(records), 12), np.nan)
    for i, rec in enumerate(records):
        for j, v in enumerate(rec.months):
            if v is not None:
                mat[i, j] = v
    return mat


def _impute_cell(mat_raw: np.ndarray, mat_z: np.ndarray, target: int,
                 month: int, k: int, rows: Sequence[int]) -> float:
    """Mean of the k nearest donors for one gap; raises NoDonorError.

    Distances use z-scored month columns observed in both rows, scaled by
    the shared-column count; ties break toward the lower original row index.
    """
    t_obs = np.isfinite(mat_z[target])
    scored = []
    for s in rows:
        if s == target or not np.isfinite(mat_raw[s, month]):
            continue
        shared = t_obs & np.isfinite(mat_z[s])
        cnt = int(shared.sum())
        if cnt == 0:
            continue
        diff = mat_z[target, shared] - mat_z[s, shared]
        dist = float(np.sqrt(np.dot(diff, diff))) / cnt
        scored.append((dist, s))
    if not scored:
        raise NoDonorError(f"no donors for row {target}, month {month + 1}")
    scored.sort(key=lambda pair: (pair[0], pair[1]))
    chosen = scored[:k]
    return float(np.mean([mat_raw[s, month] for _, s in chosen]))


def knn_impute(records: Sequence[ProductionRecord], k: int = 5
               ) -> tuple[list[ProductionRecord], CleaningReport]:
    """Fill month gaps from the k nearest rows of the same mineral and unit.

    All imputations are computed from the originally observed cells (a filled
    gap never serves as a donor), so the result does not depend on row order.
    Rows with an unfillable gap are dropped and logged. Totals are recomputed
    as the month sum for every surviving record.
    """
    if not isinstance(k, int) or k < 1:
        raise KError(f"k must be a positive integer, got {k}")
    report = CleaningReport(rows_read=len(records))
    mat_raw = _month_matrix(records)

    groups: dict[tuple[str, str], list[int]] = {}
    for i, rec in enumerate(records):
        groups.setdefault((fold_name(rec.mineral), fold_name(rec.unit)), []).append(i)

    fills: dict[int, dict[int, float]] = {}
    dropped: set[int] = set()
    for key, rows in groups.items():
        sub = mat_raw[rows]
        sub_z = np.column_stack([znormalize(sub[:, j]) if np.isfinite(sub[:, j]).any()
                                 else np.full(len(rows), np.nan)
                                 for j in range(12)])
        local = {orig: pos for pos, orig in enumerate(rows)}
        for orig in rows:
            rec = records[orig]
            if not rec.has_gaps:
                continue
            for month in range(12):
                if rec.months[month] is not None:
                    continue
                try:
                    value = _impute_cell(sub, sub_z, local[orig], month, k,
                                         list(range(len(rows))))
                except NoDonorError:
                    dropped.add(orig)
                    report.note(orig, MONTH_COLUMNS[month],
                                "dropped: no donor rows share this month")
                    break
                fills.setdefault(orig, {})[month] = value
            if orig in dropped:
                fills.pop(orig, None)

    out = []
    for i, rec in enumerate(records):
        if i in dropped:
            report.rows_dropped += 1
            continue
        months = list(rec.months)
        for month, value in fills.get(i, {}).items():
            months[month] = value
            report.values_imputed += 1
            report.note(i, MONTH_COLUMNS[month], f"imputed {value!r}")
        total = float(sum(months))
        out.append(replace(rec, months=tuple(months), total=total))
    return out, report


def _match(rec: ProductionRecord, mineral: Optional[str],
           department: Optional[str]) -> bool:
    if mineral is not None and fold_name(rec.mineral) != fold_name(mineral):
        return False
    if department is not None and fold_name(rec.department) != fold_name(department):
        return False
    return True


def to_series(records: Sequence[ProductionRecord], selector: dict) -> TimeSeries:
    """Sum matched records into one monthly series over their full span.

    Calendar months inside the span with no contribution at all are
    zero-filled (and logged): a holder that reported nothing extracted
    nothing that month.
    """
    mineral = selector.get("mineral")
    department = selector.get("department")
    matched = [r for r in records if _match(r, mineral, department)]
    if not matched:
        raise EmptySelectionError(f"no records match {selector!r}")
    units = {r.unit for r in matched}
    if len(units) > 1:
        raise MixedUnitError(
            f"selection spans units {sorted(units)}; narrow the selector")
    buckets: dict[tuple[int, int], float] = {}
    for rec in matched:
        for j, v in enumerate(rec.months):
            if v is not None:
                key = (rec.year, j + 1)
                buckets[key] = buckets.get(key, 0.0) + float(v)
    if not buckets:
        raise EmptySelectionError(f"matched records carry no month values: {selector!r}")
    start = min(buckets)
    end = max(buckets)
    n = (end[0] - start[0]) * 12 + (end[1] - start[1]) + 1
    values = np.zeros(n)
    point = start
    for i in range(n):
        if point in buckets:
            values[i] = buckets[point]
        else:
            log.info("frequency regularization: zero-filled %04d-%02d for %r",
                     point[0], point[1], selector)
        point = advance(point, 1, Frequency.MONTHLY)
    return TimeSeries(values, start=start, frequency=Frequency.MONTHLY,
                      unit=next(iter(units)))


def _format_value(v: Optional[float]) -> str:
    if v is None:
        return ""
    return repr(float(v))


def write_monthly_csv(records: Sequence[ProductionRecord], stream) -> None:
    """Write records in the monthly table layout (parse_monthly round-trips)."""
    w = csv.writer(stream, delimiter=",", lineterminator="\n")
    w.writerow(MONTHLY_COLUMNS)
    for rec in records:
        w.writerow([rec.mineral, rec.unit, rec.stage, rec.process, rec.stratum,
                    rec.holder, rec.department, str(rec.year)]
                   + [_format_value(v) for v in rec.months]
                   + [_format_value(rec.total)])
