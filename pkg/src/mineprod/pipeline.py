"""End-to-end forecasting: selector -> series -> fit -> diagnostics -> forecast.

Three levels of analysis share one path: annual totals per mineral from the
yearly table, and monthly mineral or department series summed from the
holder-level records. Horizons default to 5 years for annual series and 3
months for monthly ones.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .arima import ArimaFit, auto_arima, forecast_arima, ForecastResult
from .diagnostics import (BootstrapForecast, DiagnosticsReport, bootstrap_forecast,
                          diagnose)
from .errors import (ConvergenceError, DegenerateError, EmptySelectionError,
                     LengthError, SelectionError, TooShortError)
from .ingest import AnnualRecord, ProductionRecord, fold_name, to_series
from .series import Frequency, TimeSeries
from .statespace import StructuralFit, StructuralKind, fit_structural, \
    forecast_structural, min_length

BOOTSTRAP_REPLICATES = 500


class Level(str, Enum):
    ANNUAL_TOTAL = "AnnualTotal"
    MINERAL = "Mineral"
    DEPARTMENT = "Department"


class ModelChoice(str, Enum):
    AUTO_ARIMA = "AutoArima"
    STATE_SPACE = "StateSpace"
    BEST = "Best"


_LEVEL_ALIASES = {
    "annual": Level.ANNUAL_TOTAL, "annualtotal": Level.ANNUAL_TOTAL,
    "mineral": Level.MINERAL, "department": Level.DEPARTMENT,
}
_MODEL_ALIASES = {
    "auto": ModelChoice.AUTO_ARIMA, "autoarima": ModelChoice.AUTO_ARIMA,
    "arima": ModelChoice.AUTO_ARIMA, "statespace": ModelChoice.STATE_SPACE,
    "structural": ModelChoice.STATE_SPACE, "best": ModelChoice.BEST,
}


def parse_level(text: str) -> Level:
    key = str(text).strip().lower()
    if key not in _LEVEL_ALIASES:
        raise ValueError(f"level must be one of {[l.value for l in Level]}, "
                         f"got {text!r}")
    return _LEVEL_ALIASES[key]


def parse_model(text: str) -> ModelChoice:
    key = str(text).strip().lower()
    if key not in _MODEL_ALIASES:
        raise ValueError(f"model must be one of {[m.value for m in ModelChoice]}, "
                         f"got {text!r}")
    return _MODEL_ALIASES[key]


@dataclass(frozen=True)
class ForecastRequest:
    """What to forecast: analysis level, target name, model family, horizon."""

    level: Level
    target: str = ""
    horizon: Optional[int] = None
    model: ModelChoice = ModelChoice.AUTO_ARIMA
    confidence: float = 0.95
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "level", Level(self.level))
        object.__setattr__(self, "model", ModelChoice(self.model))
        object.__setattr__(self, "target", str(self.target).strip())
        if self.horizon is not None and (not isinstance(self.horizon, int)
                                         or self.horizon < 1):
            raise ValueError(f"horizon must be a positive integer, got {self.horizon}")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError(f"confidence must lie in (0, 1), got {self.confidence}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")

    @property
    def resolved_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return 5 if self.level == Level.ANNUAL_TOTAL else 3

    def to_dict(self) -> dict:
        return {
            "level": self.level.value,
            "target": self.target,
            "horizon": self.resolved_horizon,
            "model": self.model.value,
            "confidence": float(self.confidence),
            "seed": int(self.seed),
        }


@dataclass(frozen=True)
class PipelineResult:
    """One forecasting run: inputs used, fitted model, checks, predictions."""

    request: ForecastRequest
    series_used: dict
    fit: dict
    diagnostics: DiagnosticsReport
    forecast: ForecastResult
    bootstrap: Optional[BootstrapForecast] = None

    def to_dict(self) -> dict:
        return {
            "request": self.request.to_dict(),
            "series_used": self.series_used,
            "fit": self.fit,
            "diagnostics": self.diagnostics.to_dict(),
            "forecast": self.forecast.to_dict(),
            "bootstrap": None if self.bootstrap is None else self.bootstrap.to_dict(),
        }

    def to_json(self) -> str:
        """Canonical serialization; identical runs give identical bytes."""
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False,
                          separators=(",", ":"))


def annual_series(annual_records: Sequence[AnnualRecord], mineral: str) -> TimeSeries:
    """Yearly series for one mineral column; leading/trailing gaps trimmed."""
    wanted = fold_name(mineral)
    rows = []
    unit = ""
    for rec in annual_records:
        for name, (value, u) in rec.quantities.items():
            if fold_name(name) == wanted:
                rows.append((rec.year, value))
                unit = u
                break
    if not rows:
        known = sorted({n for rec in annual_records for n in rec.quantities})
        raise SelectionError(
            f"mineral {mineral!r} is not an annual table column; have {known}")
    rows.sort()
    lo, hi = 0, len(rows)
    while lo < hi and rows[lo][1] is None:
        lo += 1
    while hi > lo and rows[hi - 1][1] is None:
        hi -= 1
    rows = rows[lo:hi]
    if not rows:
        raise SelectionError(f"annual column {mineral!r} has no observed values")
    years = [y for y, _ in rows]
    if years != list(range(years[0], years[-1] + 1)):
        raise SelectionError(f"annual column {mineral!r} skips years in {years[0]}..{years[-1]}")
    values = [v for _, v in rows]
    if any(v is None for v in values):
        raise SelectionError(f"annual column {mineral!r} has interior gaps")
    return TimeSeries(values, start=(years[0], 1), frequency=Frequency.ANNUAL,
                      unit=unit)


def resolve_series(request: ForecastRequest,
                   monthly_records: Sequence[ProductionRecord],
                   annual_records: Sequence[AnnualRecord]) -> TimeSeries:
    if not request.target:
        raise SelectionError("a target name is required")
    if request.level == Level.ANNUAL_TOTAL:
        return annual_series(annual_records, request.target)
    selector = ({"mineral": request.target} if request.level == Level.MINERAL
                else {"department": request.target})
    try:
        return to_series(monthly_records, selector)
    except EmptySelectionError as exc:
        raise SelectionError(str(exc)) from exc


def _fit_best_structural(series: TimeSeries) -> StructuralFit:
    kinds = [StructuralKind.LOCAL_LEVEL]
    if series.n >= min_length(StructuralKind.LOCAL_TREND):
        kinds.append(StructuralKind.LOCAL_TREND)
    best = None
    last_error: Optional[Exception] = None
    for kind in kinds:
        try:
            fit = fit_structural(series, kind)
        except (ConvergenceError, LengthError) as exc:
            last_error = exc
            continue
        if best is None or fit.aic < best.aic:
            best = fit
    if best is None:
        raise last_error if last_error is not None else ConvergenceError(
            "no structural model could be fitted")
    return best


def _arima_summary(fit: ArimaFit, notes: Sequence[str]) -> dict:
    return {
        "family": "Arima",
        "spec": fit.spec.to_dict(),
        "c": float(fit.c),
        "mu": float(fit.mu),
        "phi": [float(v) for v in fit.phi],
        "theta": [float(v) for v in fit.theta],
        "sigma2": float(fit.sigma2),
        "loglik": float(fit.loglik),
        "aic": float(fit.aic),
        "n_effective": int(fit.n_effective),
        "notes": list(fit.notes) + list(notes),
    }


def _structural_summary(fit: StructuralFit, notes: Sequence[str]) -> dict:
    return {
        "family": fit.kind.value,
        "q_variances": [float(v) for v in fit.q_variances],
        "r_variance": float(fit.r_variance),
        "loglik": float(fit.loglik),
        "aic": float(fit.aic),
        "n_conditioned": int(fit.n_conditioned),
        "notes": list(notes),
    }


def run_forecast(request: ForecastRequest,
                 monthly_records: Sequence[ProductionRecord],
                 annual_records: Sequence[AnnualRecord],
                 alpha: float = 0.05) -> PipelineResult:
    """Resolve the target series, fit the requested model family, and forecast.

    model=Best fits the ARIMA search first; when its selected differencing
    order is 0 the structural candidates compete on AIC over the same
    undifferenced likelihood, otherwise the comparison is skipped (the
    likelihoods would not be comparable) and the note says so. Bootstrap
    intervals attach whenever the winning model is an ARIMA with at least
    10 residuals.
    """
    series = resolve_series(request, monthly_records, annual_records)
    horizon = request.resolved_horizon

    notes: list[str] = []
    fit: object
    if request.model == ModelChoice.AUTO_ARIMA:
        fit = auto_arima(series)
    elif request.model == ModelChoice.STATE_SPACE:
        if series.n < min_length(StructuralKind.LOCAL_LEVEL):
            raise TooShortError(
                f"state-space models need at least "
                f"{min_length(StructuralKind.LOCAL_LEVEL)} observations, got {series.n}")
        fit = _fit_best_structural(series)
    else:  # Best
        arima_fit = auto_arima(series)
        fit = arima_fit
        if arima_fit.spec.d == 0:
            try:
                struct = _fit_best_structural(series)
            except (ConvergenceError, LengthError, DegenerateError) as exc:
                notes.append(f"Best: structural fit unavailable ({exc}); kept ARIMA")
            else:
                if struct.aic < arima_fit.aic:
                    fit = struct
                    notes.append(
                        f"Best: {struct.kind.value} AIC {struct.aic:.3f} beat "
                        f"ARIMA AIC {arima_fit.aic:.3f}")
                else:
                    notes.append(
                        f"Best: ARIMA AIC {arima_fit.aic:.3f} beat "
                        f"{struct.kind.value} AIC {struct.aic:.3f}")
        else:
            notes.append(
                f"Best: selected d={arima_fit.spec.d} puts ARIMA and structural "
                f"likelihoods on different scales; kept ARIMA")

    if isinstance(fit, ArimaFit):
        forecast = forecast_arima(fit, horizon, level=request.confidence)
        summary = _arima_summary(fit, notes)
        bootstrap = None
        if fit.residuals.n >= 10:
            bootstrap = bootstrap_forecast(fit, horizon, level=request.confidence,
                                           replicates=BOOTSTRAP_REPLICATES,
                                           seed=request.seed)
    else:
        forecast = forecast_structural(fit, horizon, level=request.confidence)
        summary = _structural_summary(fit, notes)
        bootstrap = None

    start, end = series.span()
    series_used = {
        "n": series.n,
        "span": [start, end],
        "unit": series.unit,
        "frequency": int(series.frequency),
    }
    return PipelineResult(
        request=request,
        series_used=series_used,
        fit=summary,
        diagnostics=diagnose(fit, alpha=alpha),
        forecast=forecast,
        bootstrap=bootstrap,
    )
