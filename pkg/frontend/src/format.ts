// Display formatting only. Every number shown on screen passes through one
// of these from an API payload field, so tests can assert the round trip.

const qty = new Intl.NumberFormat("en-US", { maximumFractionDigits: 3 });

export function fmtQuantity(value: number): string {
  return qty.format(value);
}

/** Pie shares: the payload already holds percentages. 30 -> "30%", 42.8889 -> "42.89%". */
export function fmtShare(value: number): string {
  const s = value.toFixed(2).replace(/\.?0+$/, "");
  return `${s}%`;
}

export function fmtPValue(p: number): string {
  if (p !== 0 && p < 0.001) return p.toExponential(2);
  return p.toFixed(3);
}

/** Bin edges and similar axis labels; trims float noise like "-1109.680625". */
export function fmtAxis(label: string): string {
  const n = Number(label);
  if (!Number.isFinite(n)) return label;
  return qty.format(Math.round(n * 100) / 100);
}

/**
 * Labels for forecast steps, continuing after the last historical label.
 * Annual series use plain years ("2022" -> 2023, 2024, ...), monthly series
 * use "YYYY-MM" with December rolling over.
 */
export function stepLabels(lastLabel: string, frequency: number, horizon: number): string[] {
  const out: string[] = [];
  if (frequency === 12) {
    const m = lastLabel.match(/^(\d{4})-(\d{2})$/);
    let year = m ? Number(m[1]) : 0;
    let month = m ? Number(m[2]) : 0;
    for (let i = 0; i < horizon; i++) {
      month += 1;
      if (month > 12) {
        month = 1;
        year += 1;
      }
      out.push(`${year}-${String(month).padStart(2, "0")}`);
    }
    return out;
  }
  const year = Number(lastLabel);
  for (let i = 1; i <= horizon; i++) out.push(String(year + i));
  return out;
}
