"""Chart payloads and a tour of the HTTP API without opening a port.

    python3 demos/04_charts_and_service.py
"""

from fastapi.testclient import TestClient

from mineprod import aggregate, department_stats, frequency_polygon, pie
from mineprod.service import ServiceConfig, build_state, create_app

state = build_state(ServiceConfig(
    monthly_path="data/monthly_production_2020_2022.csv",
    annual_path="data/annual_production_1980_2022.csv",
    geo_path="data/peru_departments.geojson",
))
records = state.monthly_records

# bar chart: production by department, one series per unit
for chart in aggregate(records, "department"):
    top = ", ".join(f"{l} {v:,.0f}" for l, v in
                    list(zip(chart.labels, chart.values))[:3])
    print(f"bar [{chart.unit}] top: {top}")

# pie chart: sub-1% departments collapse into OTROS
chart = pie(records, "department")
print(f"\npie slices: {len(chart.labels)} "
      f"(last = {chart.labels[-1]} at {chart.values[-1]:.2f}%)")
print(f"shares sum to {sum(chart.values):.10f}")

# frequency polygon of copper record totals
copper = [r.total for r in records if r.mineral == "COBRE"]
poly = frequency_polygon(copper, bins=8)
print(f"\npolygon over {len(copper)} copper totals: "
      f"{len(poly.values)} points (8 bins + 2 endpoints)")

stats = department_stats(records, "JUNIN")
print(f"\nJUNIN: {stats.record_count} records, "
      f"top mineral {stats.top_mineral}, years {stats.years_covered}")

# the same numbers over HTTP
client = TestClient(create_app(state))
print("\n--- service ---")
print("health:", client.get("/api/health").json())
print("departments:", len(client.get("/api/departments").json()))
body = client.get("/api/departments/JUNIN/stats").json()
print("JUNIN via API matches library:", body == stats.to_dict())
fc = client.get("/api/forecast",
                params={"level": "Mineral", "target": "ORO"}).json()
print("forecast means:", [round(v) for v in fc["forecast"]["mean"]])
err = client.get("/api/forecast", params={"level": "Mineral"})
print("missing target ->", err.status_code, err.json())
