"""HTTP service exposing ingestion, analytics, diagnostics, and forecasts.

All query parameters are validated by hand before any computation so that
every client mistake comes back as a 400 with the same envelope:
{"code": ..., "message": ..., "field": ...}. FastAPI is used for routing
and serialization only; its automatic 422 machinery is bypassed.

Forecast responses are cached as canonical JSON strings keyed by the
sha256 of the normalized request, with least-recently-used eviction, so
identical requests return byte-identical bodies.
"""

from __future__ import annotations

import hashlib
import json
import socket
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .analytics import aggregate, department_stats, frequency_polygon, pie
from .errors import (BindError, DegenerateError, EmptyError, MineprodError,
                     MixedUnitError, ModelError, SelectionError, TooShortError,
                     UnknownDepartmentError)
from .geo import GeoCollection, load_departments
from .ingest import (CleaningReport, fold_name, knn_impute, normalize_names,
                     parse_annual, parse_monthly)
from .pipeline import ForecastRequest, parse_level, parse_model, run_forecast

DEFAULT_PORT = 8080
DEFAULT_CACHE_SIZE = 256


@dataclass
class ServiceConfig:
    monthly_path: str
    annual_path: str
    geo_path: str
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    k: int = 5
    alpha: float = 0.05
    cache_size: int = DEFAULT_CACHE_SIZE
    frontend_dir: Optional[str] = None


class ResultCache:
    """Thread-safe LRU of canonical response strings."""

    def __init__(self, size: int):
        self.size = size
        self._store: OrderedDict[str, str] = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[str]:
        with self._lock:
            if key not in self._store:
                return None
            self._store.move_to_end(key)
            return self._store[key]

    def put(self, key: str, value: str) -> None:
        with self._lock:
            self._store[key] = value
            self._store.move_to_end(key)
            while len(self._store) > self.size:
                self._store.popitem(last=False)


@dataclass
class AppState:
    """Everything the endpoints read; immutable after startup except the cache."""

    monthly_records: tuple
    annual_records: tuple
    geo: GeoCollection
    cleaning_report: CleaningReport
    alpha: float = 0.05
    cache: ResultCache = field(default_factory=lambda: ResultCache(DEFAULT_CACHE_SIZE))


def build_state(config: ServiceConfig) -> AppState:
    """Load, clean, and validate all datasets; raises on any schema problem."""
    monthly, rep_parse = parse_monthly(Path(config.monthly_path).read_bytes())
    monthly, rep_names = normalize_names(monthly)
    monthly, rep_impute = knn_impute(monthly, k=config.k)
    report = rep_parse.merged_with(rep_names).merged_with(rep_impute)
    annual = parse_annual(Path(config.annual_path).read_bytes())
    geo = load_departments(config.geo_path)
    return AppState(
        monthly_records=tuple(monthly),
        annual_records=tuple(annual),
        geo=geo,
        cleaning_report=report,
        alpha=config.alpha,
        cache=ResultCache(config.cache_size),
    )


class ApiError(Exception):
    """Maps straight onto the error envelope."""

    def __init__(self, status: int, code: str, message: str,
                 fieldname: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.fieldname = fieldname

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": str(self), "field": self.fieldname},
        )


def _bad(code: str, message: str, fieldname: Optional[str] = None) -> ApiError:
    return ApiError(400, code, message, fieldname)


def _params(request: Request) -> dict:
    return dict(request.query_params)


def _int_param(params: dict, name: str) -> Optional[int]:
    raw = params.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise _bad("invalid_parameter", f"{name} must be an integer, got {raw!r}", name)


def _float_param(params: dict, name: str) -> Optional[float]:
    raw = params.get(name)
    if raw is None or raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise _bad("invalid_parameter", f"{name} must be a number, got {raw!r}", name)


def _forecast_request(params: dict) -> ForecastRequest:
    raw_level = params.get("level")
    if not raw_level:
        raise _bad("missing_parameter", "level is required", "level")
    try:
        level = parse_level(raw_level)
    except ValueError as exc:
        raise _bad("invalid_parameter", str(exc), "level")
    target = (params.get("target") or "").strip()
    if not target:
        raise _bad("missing_parameter", "target is required", "target")
    model_raw = params.get("model") or "AutoArima"
    try:
        model = parse_model(model_raw)
    except ValueError as exc:
        raise _bad("invalid_parameter", str(exc), "model")
    horizon = _int_param(params, "horizon")
    if horizon is not None and horizon < 1:
        raise _bad("invalid_parameter", f"horizon must be >= 1, got {horizon}", "horizon")
    confidence = _float_param(params, "confidence")
    if confidence is None:
        confidence = 0.95
    if not 0.0 < confidence < 1.0:
        raise _bad("invalid_parameter",
                   f"confidence must lie in (0, 1), got {confidence}", "confidence")
    seed = _int_param(params, "seed")
    if seed is None:
        seed = 42
    return ForecastRequest(level=level, target=target, horizon=horizon,
                           model=model, confidence=confidence, seed=seed)


def _request_key(request: ForecastRequest) -> str:
    canon = json.dumps(request.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _run_cached(state: AppState, request: ForecastRequest) -> str:
    key = _request_key(request)
    hit = state.cache.get(key)
    if hit is not None:
        return hit
    try:
        result = run_forecast(request, state.monthly_records,
                              state.annual_records, alpha=state.alpha)
    except SelectionError as exc:
        raise _bad("unknown_target", str(exc), "target")
    except TooShortError as exc:
        raise _bad("too_short", str(exc), "target")
    except MixedUnitError as exc:
        raise _bad("mixed_unit", str(exc), "target")
    body = result.to_json()
    state.cache.put(key, body)
    return body


def _mineral_filter(state: AppState, params: dict) -> list:
    records = list(state.monthly_records)
    mineral = (params.get("mineral") or "").strip()
    if mineral:
        wanted = fold_name(mineral)
        records = [r for r in records if fold_name(r.mineral) == wanted]
        if not records:
            raise _bad("empty_selection", f"no records for mineral {mineral!r}",
                       "mineral")
    return records


def create_app(state: AppState, frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="mineprod", docs_url=None, redoc_url=None,
                  openapi_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(MineprodError)
    async def _domain_error(_req: Request, exc: MineprodError):
        status = 500 if isinstance(exc, ModelError) else 400
        return JSONResponse(
            status_code=status,
            content={"code": type(exc).__name__, "message": str(exc), "field": None},
        )

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/departments")
    def departments():
        return list(state.geo.names)

    @app.get("/api/departments/{name}/stats")
    def stats(name: str):
        try:
            result = department_stats(state.monthly_records, name)
        except UnknownDepartmentError as exc:
            raise ApiError(404, "unknown_department", str(exc), "name")
        return result.to_dict()

    @app.get("/api/minerals")
    def minerals():
        return sorted({r.mineral for r in state.monthly_records})

    @app.get("/api/geo")
    def geo():
        return state.geo.to_dict()

    @app.get("/api/charts/bar")
    def chart_bar(request: Request):
        params = _params(request)
        group_by = params.get("group_by") or "department"
        records = _mineral_filter(state, params)
        try:
            charts = aggregate(records, group_by)
        except ValueError as exc:
            raise _bad("invalid_parameter", str(exc), "group_by")
        except EmptyError as exc:
            raise _bad("empty_selection", str(exc), "mineral")
        return {"charts": [c.to_dict() for c in charts]}

    @app.get("/api/charts/pie")
    def chart_pie(request: Request):
        params = _params(request)
        group_by = params.get("group_by") or "department"
        records = _mineral_filter(state, params)
        try:
            chart = pie(records, group_by)
        except ValueError as exc:
            raise _bad("invalid_parameter", str(exc), "group_by")
        except EmptyError as exc:
            raise _bad("empty_selection", str(exc), "mineral")
        except DegenerateError as exc:
            raise _bad("degenerate_data", str(exc), "mineral")
        return {"charts": [chart.to_dict()]}

    @app.get("/api/charts/polygon")
    def chart_polygon(request: Request):
        params = _params(request)
        records = _mineral_filter(state, params)
        bins = _int_param(params, "bins")
        if bins is not None and bins < 1:
            raise _bad("invalid_parameter", f"bins must be >= 1, got {bins}", "bins")
        values = [r.total if r.total is not None else r.month_sum()
                  for r in records]
        try:
            chart = frequency_polygon(values, bins=bins)
        except EmptyError as exc:
            raise _bad("empty_selection", str(exc), "mineral")
        except DegenerateError as exc:
            raise _bad("degenerate_data", str(exc), "mineral")
        return {"charts": [chart.to_dict()]}

    @app.get("/api/forecast")
    def forecast(request: Request):
        req = _forecast_request(_params(request))
        body = _run_cached(state, req)
        return Response(content=body, media_type="application/json")

    @app.get("/api/diagnostics")
    def diagnostics(request: Request):
        req = _forecast_request(_params(request))
        body = json.loads(_run_cached(state, req))
        subset = {key: body[key] for key in
                  ("request", "series_used", "fit", "diagnostics")}
        return Response(
            content=json.dumps(subset, sort_keys=True, ensure_ascii=False,
                               separators=(",", ":")),
            media_type="application/json")

    if frontend_dir:
        root = Path(frontend_dir)
        if (root / "index.html").is_file():
            app.mount("/", StaticFiles(directory=str(root), html=True), name="ui")

    return app


def _check_port(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def serve(config: ServiceConfig) -> None:
    """Validate datasets, bind the port, and run until interrupted."""
    import uvicorn

    state = build_state(config)
    app = create_app(state, frontend_dir=config.frontend_dir)
    _check_port(config.host, config.port)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
