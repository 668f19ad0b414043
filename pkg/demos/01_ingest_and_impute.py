"""Walk the monthly extract from raw CSV to a gap-free table.

Run from the repository root:

    python3 demos/01_ingest_and_impute.py
"""

from collections import Counter

from mineprod import knn_impute, normalize_names, parse_monthly

RAW = "data/monthly_production_2020_2022.csv"

records, report = parse_monthly(open(RAW, "rb").read())
print(f"parsed {report.rows_read} rows, dropped {report.rows_dropped}")

# the raw file mixes accented and unaccented spellings of the same names
records, name_report = normalize_names(records)
print(f"corrected {name_report.names_corrected} name fields")

gappy = sum(1 for r in records if r.has_gaps)
print(f"{gappy} rows carry at least one missing month")

filled, impute_report = knn_impute(records, k=5)
print(f"imputed {impute_report.values_imputed} cells, "
      f"dropped {impute_report.rows_dropped} rows with no usable donors")

assert not any(r.has_gaps for r in filled)

# a quick look at what the cleaned table covers
minerals = Counter(r.mineral for r in filled)
print("\nrecords per mineral:")
for name, count in minerals.most_common():
    print(f"  {name:<10} {count}")

units = sorted({(r.mineral, r.unit) for r in filled})
gold = [u for m, u in units if m == "ORO"]
print(f"\ngold is reported in {gold[0]}, everything else in fine tons")
