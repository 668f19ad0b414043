"""Mining-production analytics and forecasting toolkit."""

from .analytics import (
    ChartKind,
    ChartSeries,
    DepartmentStats,
    aggregate,
    department_stats,
    frequency_polygon,
    pie,
)
from .arima import (
    ArimaFit,
    ArimaSpec,
    ForecastResult,
    arma_loglik,
    auto_arima,
    fit_arima,
    forecast_arima,
    simulate_arima,
)
from .diagnostics import (
    BootstrapForecast,
    DiagnosticsReport,
    TestResult,
    bootstrap_forecast,
    diagnose,
    ljung_box,
    shapiro_wilk,
)
from .geo import GeoCollection, GeoDepartment, load_departments
from .ingest import (
    AnnualRecord,
    CleaningReport,
    ProductionRecord,
    knn_impute,
    normalize_label,
    normalize_names,
    parse_annual,
    parse_monthly,
    to_series,
    write_monthly_csv,
)
from .pipeline import (
    ForecastRequest,
    Level,
    ModelChoice,
    PipelineResult,
    run_forecast,
)
from .series import Frequency, TimeSeries, acf, difference, inverse_difference, znormalize
from .statespace import (
    Control,
    StructuralFit,
    StructuralKind,
    fit_structural,
    forecast_structural,
    kalman_step,
)

__version__ = "0.1.0"

__all__ = [
    "AnnualRecord",
    "ArimaFit",
    "ArimaSpec",
    "BootstrapForecast",
    "ChartKind",
    "ChartSeries",
    "CleaningReport",
    "Control",
    "DepartmentStats",
    "DiagnosticsReport",
    "ForecastRequest",
    "ForecastResult",
    "Frequency",
    "GeoCollection",
    "GeoDepartment",
    "Level",
    "ModelChoice",
    "PipelineResult",
    "ProductionRecord",
    "StructuralFit",
    "StructuralKind",
    "TestResult",
    "TimeSeries",
    "acf",
    "aggregate",
    "arma_loglik",
    "auto_arima",
    "bootstrap_forecast",
    "department_stats",
    "diagnose",
    "difference",
    "fit_arima",
    "fit_structural",
    "forecast_arima",
    "forecast_structural",
    "frequency_polygon",
    "inverse_difference",
    "kalman_step",
    "knn_impute",
    "ljung_box",
    "load_departments",
    "normalize_label",
    "normalize_names",
    "parse_annual",
    "parse_monthly",
    "pie",
    "run_forecast",
    "shapiro_wilk",
    "simulate_arima",
    "to_series",
    "write_monthly_csv",
    "znormalize",
]
