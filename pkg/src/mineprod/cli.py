"""Command-line surface: ingest, validate, forecast, diagnose, charts, serve.

Exit codes: 0 success, 2 input/validation failure, 1 runtime error, 64 usage.
Dataset paths default to the files in ./data and can be overridden by flags
or the MINEPROD_MONTHLY / MINEPROD_ANNUAL / MINEPROD_GEO environment
variables (flags win).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .analytics import aggregate, frequency_polygon, pie
from .errors import DataError, GeoError, MineprodError
from .geo import load_departments
from .ingest import (fold_name, knn_impute, normalize_names, parse_annual,
                     parse_monthly, write_monthly_csv)
from .pipeline import ForecastRequest, parse_level, parse_model, run_forecast
from .service import DEFAULT_CACHE_SIZE, DEFAULT_PORT, ServiceConfig, serve

DEFAULT_MONTHLY = "data/monthly_production_2020_2022.csv"
DEFAULT_ANNUAL = "data/annual_production_1980_2022.csv"
DEFAULT_GEO = "data/peru_departments.geojson"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse that exits 64 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(name: str, fallback: str) -> str:
    return os.environ.get(name, fallback)


def _dump(obj, stream=None) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False),
          file=stream or sys.stdout)


def _load_monthly(path: str, k: int):
    records, rep_parse = parse_monthly(Path(path).read_bytes())
    records, rep_names = normalize_names(records)
    records, rep_impute = knn_impute(records, k=k)
    return records, rep_parse.merged_with(rep_names).merged_with(rep_impute)


def cmd_ingest(args) -> int:
    records, report = _load_monthly(args.input, args.k)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_monthly_csv(records, fh)
    else:
        write_monthly_csv(records, sys.stdout)
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True,
                       ensure_ascii=False), encoding="utf-8")
    else:
        _dump(report.to_dict(), stream=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        if args.kind == "monthly":
            records, rep_parse = parse_monthly(Path(args.input).read_bytes())
            records, rep_names = normalize_names(records)
            _, rep_impute = knn_impute(records, k=args.k)
            report = rep_parse.merged_with(rep_names).merged_with(rep_impute)
            _dump({"ok": True, "report": report.to_dict()})
        elif args.kind == "annual":
            records = parse_annual(Path(args.input).read_bytes())
            years = [r.year for r in records]
            _dump({"ok": True, "report": {
                "rows_read": len(records),
                "years": [min(years), max(years)] if years else None,
            }})
        else:
            geo = load_departments(args.input)
            _dump({"ok": True, "report": {"departments": list(geo.names)}})
        return EXIT_OK
    except (DataError, GeoError) as exc:
        _dump({"ok": False,
               "error": {"code": type(exc).__name__, "message": str(exc)},
               "report": None})
        return EXIT_INVALID


def _build_request(args) -> ForecastRequest:
    return ForecastRequest(
        level=parse_level(args.level),
        target=args.target,
        horizon=args.horizon,
        model=parse_model(args.model),
        confidence=args.confidence,
        seed=args.seed,
    )


def _run_pipeline(args):
    request = _build_request(args)
    monthly = []
    annual = []
    if request.level.value == "AnnualTotal":
        annual = parse_annual(Path(args.annual).read_bytes())
    else:
        monthly, _ = _load_monthly(args.monthly, args.k)
    return run_forecast(request, monthly, annual, alpha=args.alpha)


def cmd_forecast(args) -> int:
    result = _run_pipeline(args)
    _dump(result.to_dict())
    return EXIT_OK


def cmd_diagnose(args) -> int:
    result = _run_pipeline(args)
    body = result.to_dict()
    _dump({key: body[key] for key in
           ("request", "series_used", "fit", "diagnostics")})
    return EXIT_OK


def cmd_charts(args) -> int:
    records, _ = _load_monthly(args.monthly, args.k)
    if args.mineral:
        wanted = fold_name(args.mineral)
        records = [r for r in records if fold_name(r.mineral) == wanted]
        if not records:
            print(f"no records for mineral {args.mineral!r}", file=sys.stderr)
            return EXIT_INVALID
    if args.kind == "bar":
        charts = aggregate(records, args.group_by)
    elif args.kind == "pie":
        charts = [pie(records, args.group_by)]
    else:
        values = [r.total if r.total is not None else r.month_sum()
                  for r in records]
        charts = [frequency_polygon(values, bins=args.bins)]
    _dump({"charts": [c.to_dict() for c in charts]})
    return EXIT_OK


def cmd_serve(args) -> int:
    config = ServiceConfig(
        monthly_path=args.monthly,
        annual_path=args.annual,
        geo_path=args.geo,
        host=args.host,
        port=args.port,
        k=args.k,
        alpha=args.alpha,
        cache_size=args.cache_size,
        frontend_dir=args.frontend,
    )
    serve(config)
    return EXIT_OK


def _add_dataset_flags(p: argparse.ArgumentParser, annual: bool = True,
                       geo: bool = False) -> None:
    p.add_argument("--monthly", default=_env("MINEPROD_MONTHLY", DEFAULT_MONTHLY),
                   help="monthly production CSV")
    if annual:
        p.add_argument("--annual", default=_env("MINEPROD_ANNUAL", DEFAULT_ANNUAL),
                       help="annual production CSV")
    if geo:
        p.add_argument("--geo", default=_env("MINEPROD_GEO", DEFAULT_GEO),
                       help="department boundary GeoJSON")
    p.add_argument("--k", type=int, default=5, help="imputation neighbors")


def _add_forecast_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--level", required=True,
                   help="annual | mineral | department")
    p.add_argument("--target", required=True,
                   help="mineral or department name")
    p.add_argument("--horizon", type=int, default=None,
                   help="steps ahead (default: 5 annual, 3 monthly)")
    p.add_argument("--model", default="auto",
                   help="auto | statespace | best")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--alpha", type=float, default=0.05,
                   help="diagnostic significance level")


def build_parser() -> _Parser:
    parser = _Parser(prog="mineprod",
                     description="Mining production analytics and forecasting")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("ingest", help="parse, clean, impute; write normalized CSV")
    p.add_argument("input", help="monthly production CSV")
    p.add_argument("-o", "--output", default=None,
                   help="normalized CSV path (default stdout)")
    p.add_argument("--report", default=None,
                   help="cleaning report JSON path (default stderr)")
    p.add_argument("--k", type=int, default=5, help="imputation neighbors")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("validate", help="check a dataset, print the report")
    p.add_argument("input", help="file to validate")
    p.add_argument("--kind", choices=("monthly", "annual", "geo"),
                   default="monthly")
    p.add_argument("--k", type=int, default=5, help="imputation neighbors")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("forecast", help="run the forecasting pipeline")
    _add_dataset_flags(p)
    _add_forecast_flags(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("diagnose", help="fit and print residual diagnostics")
    _add_dataset_flags(p)
    _add_forecast_flags(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("charts", help="print chart series JSON")
    _add_dataset_flags(p, annual=False)
    p.add_argument("--kind", choices=("bar", "pie", "polygon"), default="bar")
    p.add_argument("--group-by", dest="group_by", default="department",
                   help="mineral | department | year | stratum | stage")
    p.add_argument("--mineral", default=None, help="restrict to one mineral")
    p.add_argument("--bins", type=int, default=None, help="polygon bin count")
    p.set_defaults(func=cmd_charts)

    p = sub.add_parser("serve", help="run the HTTP service")
    _add_dataset_flags(p, geo=True)
    p.add_argument("--host", default=_env("MINEPROD_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int,
                   default=int(_env("MINEPROD_PORT", str(DEFAULT_PORT))))
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--cache-size", dest="cache_size", type=int,
                   default=DEFAULT_CACHE_SIZE)
    p.add_argument("--frontend", default=_env("MINEPROD_FRONTEND", "frontend/dist"),
                   help="static dashboard directory (served when present)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, GeoError) as exc:
        print(f"mineprod: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"mineprod: invalid value: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MineprodError as exc:
        print(f"mineprod: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"mineprod: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
