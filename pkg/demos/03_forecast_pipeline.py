"""End-to-end forecasts from the bundled fixtures, exactly as the API runs them.

    python3 demos/03_forecast_pipeline.py
"""

import json

from mineprod import (
    ForecastRequest,
    Level,
    ModelChoice,
    knn_impute,
    normalize_names,
    parse_annual,
    parse_monthly,
    run_forecast,
)

monthly, _ = parse_monthly(open("data/monthly_production_2020_2022.csv", "rb").read())
monthly, _ = normalize_names(monthly)
monthly, _ = knn_impute(monthly, k=5)
annual = parse_annual(open("data/annual_production_1980_2022.csv", "rb").read())

# five-year copper outlook from the 1980-2022 annual column
req = ForecastRequest(level=Level.ANNUAL_TOTAL, target="COBRE")
result = run_forecast(req, monthly, annual)
fc = result.forecast
print(f"annual COBRE, model family {result.fit['family']}, "
      f"series {result.series_used['span'][0]}..{result.series_used['span'][1]}")
for h in range(fc.horizon):
    year = 2023 + h
    print(f"  {year}: {fc.mean[h]:>14,.0f} TMF   "
          f"[{fc.lower[h]:>14,.0f}, {fc.upper[h]:>14,.0f}]")

# three-month gold outlook, bootstrap bands attached
req = ForecastRequest(level=Level.MINERAL, target="ORO", seed=42)
result = run_forecast(req, monthly, annual)
print(f"\nmonthly ORO ({result.series_used['unit']}), "
      f"{result.fit['family']} {result.fit.get('spec')}")
boot = result.bootstrap
for h in range(result.forecast.horizon):
    line = (f"  h={h + 1}: {result.forecast.mean[h]:>12,.0f}  "
            f"gaussian [{result.forecast.lower[h]:>12,.0f}, "
            f"{result.forecast.upper[h]:>12,.0f}]")
    if boot is not None:
        line += (f"  bootstrap [{boot.lower[h]:>12,.0f}, "
                 f"{boot.upper[h]:>12,.0f}]")
    print(line)

# "Best" pits the ARIMA search against the structural models on one series
req = ForecastRequest(level=Level.DEPARTMENT, target="PASCO",
                      model=ModelChoice.BEST)
result = run_forecast(req, monthly, annual)
print(f"\nPASCO, model=Best -> {result.fit['family']}")
for note in result.fit["notes"]:
    print(f"  note: {note}")

# every run of the same request serializes to identical bytes
again = run_forecast(req, monthly, annual)
print("\nbyte-identical rerun:", again.to_json() == result.to_json())

# the full payload is what the HTTP service returns
payload = json.loads(result.to_json())
print("payload keys:", sorted(payload))
