"""Generate the synthetic datasets under data/.

Shapes follow the public MINEM extracts: a holder-level monthly production
table (2,151 rows, 2020-2022), an annual table (1980-2022, eight minerals),
and a stylized 25-department boundary file. Values are deterministic draws,
not real figures. Run from the repo root:

    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data"

TARGET_ROWS = 2151
YEARS = (2020, 2021, 2022)
TRIPLES = TARGET_ROWS // len(YEARS)  # 717 holder-mineral-department triples

DEPARTMENTS = [
    "AMAZONAS", "ANCASH", "APURIMAC", "AREQUIPA", "AYACUCHO", "CAJAMARCA",
    "CALLAO", "CUSCO", "HUANCAVELICA", "HUANUCO", "ICA", "JUNIN",
    "LA LIBERTAD", "LAMBAYEQUE", "LIMA", "LORETO", "MADRE DE DIOS",
    "MOQUEGUA", "PASCO", "PIURA", "PUNO", "SAN MARTIN", "TACNA", "TUMBES",
    "UCAYALI",
]

# accented spellings that the ingest normalizer must fold back
DEPT_VARIANTS = {
    "ANCASH": "Áncash", "APURIMAC": "Apurímac", "HUANUCO": "Huánuco",
    "JUNIN": "Junín", "SAN MARTIN": "San Martín",
}
MINERAL_VARIANTS = {
    "ESTAÑO": "Estaño", "COBRE": "Cobre", "ORO": "Oro", "PLATA": "Plata",
}

MINERALS = ["COBRE", "ZINC", "ORO", "PLATA", "PLOMO", "ESTAÑO", "MOLIBDENO",
            "HIERRO"]
MINERAL_WEIGHTS = [0.22, 0.17, 0.15, 0.14, 0.12, 0.08, 0.07, 0.05]
UNITS = {m: "TMF" for m in MINERALS}
UNITS["ORO"] = "KG"

# per-holder monthly scale (log-space center, spread)
SCALES = {
    "COBRE": (8.6, 1.1), "ZINC": (7.8, 1.0), "ORO": (3.4, 1.2),
    "PLATA": (4.2, 1.0), "PLOMO": (7.0, 0.9), "ESTAÑO": (6.2, 0.7),
    "MOLIBDENO": (5.6, 0.8), "HIERRO": (9.8, 1.3),
}

STAGES = ["EXPLOTACION", "BENEFICIO"]
PROCESSES = ["CONCENTRACION", "LIXIVIACION", "FUNDICION", "GRAVIMETRIA"]
STRATA = ["GRAN MINERIA", "MEDIANA MINERIA", "PEQUEÑA MINERIA", "ARTESANAL"]

HOLDER_HEADS = ["ANDINA", "AUSTRAL", "PACIFICO", "SIERRA", "QECHUA", "WARI",
                "CHAVIN", "NAZCA", "MOCHE", "TITICACA", "URUBAMBA", "MANTARO",
                "COLCA", "MAJES", "ZAÑA", "RIMAC", "SANTA", "CHIRA"]
HOLDER_TAILS = ["S.A.A.", "S.A.C.", "E.I.R.L.", "S.R.L."]

GAP_TOKENS = ["", "NA", "N/A", "-"]


def _holders(rng: np.random.Generator) -> list:
    names = []
    for head in HOLDER_HEADS:
        for i in range(1, 9):
            tail = HOLDER_TAILS[(i + len(head)) % len(HOLDER_TAILS)]
            names.append(f"COMPAÑIA MINERA {head} {'I' * i} {tail}")
    rng.shuffle(names)
    return names


def _fmt(value: float, rng: np.random.Generator) -> str:
    s = f"{value:.2f}"
    if value >= 1000.0 and rng.random() < 0.5:
        head, frac = s.split(".")
        groups = []
        while len(head) > 3:
            groups.insert(0, head[-3:])
            head = head[:-3]
        groups.insert(0, head)
        return ",".join(groups) + "." + frac
    return s


def make_monthly(rng: np.random.Generator) -> str:
    holders = _holders(rng)
    triples = []
    for i, dept in enumerate(DEPARTMENTS):
        # seed one triple per department so every region has data
        pool = [m for m in MINERALS if not (dept == "PASCO" and m == "ORO")]
        mineral = pool[i % len(pool)]
        triples.append((holders[i % len(holders)], mineral, dept))
    while len(triples) < TRIPLES:
        dept = DEPARTMENTS[int(rng.integers(len(DEPARTMENTS)))]
        mineral = str(rng.choice(MINERALS, p=MINERAL_WEIGHTS))
        if dept == "PASCO" and mineral == "ORO":
            mineral = "PLATA"  # keep one department single-unit for demos
        holder = holders[int(rng.integers(len(holders)))]
        triples.append((holder, mineral, dept))

    gap_rows = set(rng.choice(TARGET_ROWS, size=90, replace=False).tolist())
    lines = ["Mineral;Unidad de medida;Etapa;Proceso;Estrato;Titular;"
             "Departamento;Año;Enero;Febrero;Marzo;Abril;Mayo;Junio;Julio;"
             "Agosto;Septiembre;Octubre;Noviembre;Diciembre;Total"]
    row_no = 0
    for holder, mineral, dept in triples:
        mu, sigma = SCALES[mineral]
        base = float(np.exp(rng.normal(mu, sigma)))
        stage = STAGES[int(rng.integers(len(STAGES)))]
        process = PROCESSES[int(rng.integers(len(PROCESSES)))]
        stratum = STRATA[int(rng.integers(len(STRATA)))]
        for year in YEARS:
            drift = 1.0 + 0.04 * (year - YEARS[0]) + rng.normal(0.0, 0.05)
            season = 1.0 + 0.12 * np.sin(2 * np.pi * (np.arange(12) + 3) / 12)
            noise = np.exp(rng.normal(0.0, 0.18, size=12))
            months = np.round(np.maximum(base * drift * season * noise, 0.0), 2)
            cells = [_fmt(v, rng) for v in months]
            observed = list(months)
            if row_no in gap_rows:
                n_gaps = int(rng.integers(1, 4))
                for j in rng.choice(12, size=n_gaps, replace=False):
                    cells[j] = GAP_TOKENS[int(rng.integers(len(GAP_TOKENS)))]
                    observed[j] = 0.0
            total = _fmt(float(np.sum(observed)), rng)
            dept_out = dept
            if dept in DEPT_VARIANTS and rng.random() < 0.4:
                dept_out = DEPT_VARIANTS[dept]
            mineral_out = mineral
            if mineral in MINERAL_VARIANTS and rng.random() < 0.3:
                mineral_out = MINERAL_VARIANTS[mineral]
            lines.append(";".join([mineral_out, UNITS[mineral], stage, process,
                                   stratum, holder, dept_out, str(year)]
                                  + cells + [total]))
            row_no += 1
    assert row_no == TARGET_ROWS, row_no
    return "\n".join(lines) + "\n"


# 2022 anchor levels for the annual table (order matches MINERALS)
ANNUAL_2022 = {
    "COBRE": 2_438_000, "ZINC": 1_402_000, "ORO": 96_000_000,
    "PLATA": 3_100, "PLOMO": 263_000, "ESTAÑO": 28_000,
    "MOLIBDENO": 33_000, "HIERRO": 12_600_000,
}


def make_annual(rng: np.random.Generator) -> str:
    years = list(range(1980, 2023))
    header = ["AÑO"] + [f"{m}({UNITS[m]})" for m in MINERALS]
    columns = {}
    for mineral in MINERALS:
        end = ANNUAL_2022[mineral]
        # smooth growth path anchored at 2022, noisy multiplicative steps
        growth = rng.normal(0.045, 0.06, size=len(years) - 1)
        factors = np.concatenate([[1.0], np.exp(np.cumsum(growth))])
        path = end * factors / factors[-1]
        columns[mineral] = [int(round(v)) for v in path]
    rows = [",".join(header)]
    for i, year in enumerate(years):
        cells = [str(year)]
        for mineral in MINERALS:
            if mineral == "HIERRO" and year < 1990:
                cells.append("")  # column starts a decade late
            else:
                cells.append(str(columns[mineral][i]))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


GEO_VARIANTS = {
    "JUNIN": "JUNÍN", "HUANUCO": "HUÁNUCO", "APURIMAC": "APURÍMAC",
    "SAN MARTIN": "SAN MARTÍN",
}


def make_geo() -> dict:
    # stylized 5x5 tile grid over Peru's bounding box, alphabetical order
    lon0, lat0 = -81.0, 0.0
    dlon, dlat = 2.2, -3.6
    features = []
    for i, dept in enumerate(DEPARTMENTS):
        col, row = i % 5, i // 5
        west = lon0 + col * dlon + 0.15
        east = lon0 + (col + 1) * dlon - 0.15
        north = lat0 + row * dlat - 0.12
        south = lat0 + (row + 1) * dlat + 0.12
        ring = [[west, south], [east, south], [east, north], [west, north],
                [west, south]]
        features.append({
            "type": "Feature",
            "properties": {"NOMBDEP": GEO_VARIANTS.get(dept, dept)},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        })
    return {"type": "FeatureCollection", "features": features}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(414243)
    (OUT / "monthly_production_2020_2022.csv").write_text(
        make_monthly(rng), encoding="utf-8")
    rng_annual = np.random.default_rng(19802022)
    (OUT / "annual_production_1980_2022.csv").write_text(
        make_annual(rng_annual), encoding="utf-8")
    (OUT / "peru_departments.geojson").write_text(
        json.dumps(make_geo(), ensure_ascii=False, indent=1), encoding="utf-8")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
