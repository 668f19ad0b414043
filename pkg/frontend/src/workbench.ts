import type {
  ChartsPayload,
  ForecastForm,
  ForecastResponse,
} from "./types.js";
import { ApiFault } from "./api.js";
import { fmtPValue, fmtQuantity, fmtShare, stepLabels } from "./format.js";
import { renderBar } from "./charts.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// horizon defaults by analysis level: annual totals look 5 years out,
// monthly series 3 months
const DEFAULT_HORIZON: Record<string, number> = {
  annual: 5,
  mineral: 3,
  department: 3,
};

const LEVELS: Array<[string, string]> = [
  ["annual", "Annual total"],
  ["mineral", "Mineral (monthly)"],
  ["department", "Department (monthly)"],
];

const MODELS: Array<[string, string]> = [
  ["auto", "Auto ARIMA"],
  ["statespace", "State space"],
  ["best", "Best of both"],
];

export interface WorkbenchDeps {
  forecast(form: ForecastForm): Promise<ForecastResponse>;
  /** Yearly totals for a mineral, used as the historical context strip. */
  yearlyTotals(mineral: string): Promise<ChartsPayload>;
}

export interface WorkbenchHandle {
  element: HTMLElement;
  submit(): Promise<void>;
  /** Prefill the form (map click steering). */
  setTarget(level: string, target: string): void;
}

function div(className: string, text?: string): HTMLDivElement {
  const node = document.createElement("div");
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function field(
  name: string,
  label: string,
  control: HTMLElement,
): HTMLElement {
  const wrap = div("field");
  wrap.dataset.field = name;
  const lab = document.createElement("label");
  lab.textContent = label + " ";
  lab.appendChild(control);
  wrap.appendChild(lab);
  const err = document.createElement("span");
  err.className = "field-error";
  err.dataset.field = name;
  err.hidden = true;
  wrap.appendChild(err);
  return wrap;
}

function select(name: string, options: Array<[string, string]>): HTMLSelectElement {
  const sel = document.createElement("select");
  sel.name = name;
  for (const [value, text] of options) {
    const opt = document.createElement("option");
    opt.value = value;
    opt.textContent = text;
    sel.appendChild(opt);
  }
  return sel;
}

function chronological(payload: ChartsPayload): ChartsPayload {
  // year bars arrive sorted by value; replay them in time order for the
  // context strip, keeping each label/value pair intact
  const charts = payload.charts.map((series) => {
    const order = series.labels
      .map((label, i) => [label, i] as [string, number])
      .sort((a, b) => a[0].localeCompare(b[0]));
    return {
      ...series,
      labels: order.map(([label]) => label),
      values: order.map(([, i]) => series.values[i]),
    };
  });
  return { charts };
}

function forecastChart(result: ForecastResponse): HTMLElement {
  const { forecast, series_used } = result;
  const labels = stepLabels(series_used.span[1], series_used.frequency, forecast.horizon);
  const width = 560, height = 220, pad = 30;

  let lo = Infinity, hi = -Infinity;
  for (const v of forecast.lower) if (v < lo) lo = v;
  for (const v of forecast.upper) if (v > hi) hi = v;
  if (!(hi > lo)) { hi = lo + 1; }

  const n = forecast.horizon;
  const x = (i: number) => pad + (n > 1 ? (i * (width - 2 * pad)) / (n - 1) : (width - 2 * pad) / 2);
  const y = (v: number) => height - pad - ((v - lo) / (hi - lo)) * (height - 2 * pad);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "fc-chart");

  const band = document.createElementNS(SVG_NS, "polygon");
  const upperPts = forecast.upper.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`);
  const lowerPts = forecast.lower.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).reverse();
  band.setAttribute("points", [...upperPts, ...lowerPts].join(" "));
  band.setAttribute("class", "band");
  svg.appendChild(band);

  const mean = document.createElementNS(SVG_NS, "polyline");
  mean.setAttribute(
    "points",
    forecast.mean.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(" "),
  );
  mean.setAttribute("class", "fc-mean");
  mean.setAttribute("fill", "none");
  svg.appendChild(mean);

  forecast.mean.forEach((v, i) => {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", x(i).toFixed(1));
    dot.setAttribute("cy", y(v).toFixed(1));
    dot.setAttribute("r", "3.5");
    dot.setAttribute("class", "fc-point");
    dot.dataset.label = labels[i];
    dot.dataset.mean = String(v);
    svg.appendChild(dot);
  });

  labels.forEach((label, i) => {
    if (n > 8 && i !== 0 && i !== n - 1) return;
    const tick = document.createElementNS(SVG_NS, "text");
    tick.setAttribute("x", x(i).toFixed(1));
    tick.setAttribute("y", String(height - 8));
    tick.setAttribute("text-anchor", "middle");
    tick.setAttribute("class", "tick");
    tick.textContent = label;
    svg.appendChild(tick);
  });

  return svg as unknown as HTMLElement;
}

function numbersTable(result: ForecastResponse): HTMLElement {
  const { forecast, series_used } = result;
  const labels = stepLabels(series_used.span[1], series_used.frequency, forecast.horizon);
  const table = document.createElement("table");
  table.className = "fc-table";
  const caption = document.createElement("caption");
  caption.textContent =
    `${fmtShare(forecast.level * 100)} interval, ${forecast.unit}`;
  table.appendChild(caption);
  const head = document.createElement("tr");
  for (const h of ["Step", "Mean", "Lower", "Upper"]) {
    const th = document.createElement("th");
    th.textContent = h;
    head.appendChild(th);
  }
  table.appendChild(head);
  labels.forEach((label, i) => {
    const row = document.createElement("tr");
    row.dataset.step = label;
    const cells: Array<[string, number | null]> = [
      [label, null],
      [fmtQuantity(forecast.mean[i]), forecast.mean[i]],
      [fmtQuantity(forecast.lower[i]), forecast.lower[i]],
      [fmtQuantity(forecast.upper[i]), forecast.upper[i]],
    ];
    for (const [text, raw] of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      if (raw !== null) td.dataset.value = String(raw);
      row.appendChild(td);
    }
    table.appendChild(row);
  });
  return table;
}

function badges(result: ForecastResponse): HTMLElement {
  const wrap = div("diag-badges");
  const one = (
    label: string,
    test: { p_value: number; statistic: number } | null,
    pass: boolean | null,
  ) => {
    if (!test || pass === null) return;
    const badge = document.createElement("span");
    badge.className = pass ? "badge badge-pass" : "badge badge-fail";
    badge.textContent = `${label} p=${fmtPValue(test.p_value)}`;
    badge.title = `statistic ${test.statistic}`;
    wrap.appendChild(badge);
  };
  one("Ljung-Box", result.diagnostics.ljung_box, result.diagnostics.ljung_box_pass);
  one("Shapiro-Wilk", result.diagnostics.shapiro_wilk, result.diagnostics.shapiro_wilk_pass);
  return wrap;
}

function fitLine(result: ForecastResponse): HTMLElement {
  const { fit } = result;
  const spec = fit.spec ? ` (${fit.spec.p},${fit.spec.d},${fit.spec.q})` : "";
  const line = div("fit-line", `${fit.family}${spec}, AIC ${fmtQuantity(fit.aic)}`);
  if (fit.notes.length) {
    const notes = document.createElement("ul");
    notes.className = "fit-notes";
    for (const note of fit.notes) {
      const li = document.createElement("li");
      li.textContent = note;
      notes.appendChild(li);
    }
    line.appendChild(notes);
  }
  return line;
}

export function forecastWorkbench(deps: WorkbenchDeps): WorkbenchHandle {
  const root = document.createElement("section");
  root.className = "workbench";

  const levelSel = select("level", LEVELS);
  const targetInput = document.createElement("input");
  targetInput.name = "target";
  targetInput.placeholder = "COBRE, ORO, PASCO, ...";
  const modelSel = select("model", MODELS);
  const horizonInput = document.createElement("input");
  horizonInput.name = "horizon";
  horizonInput.type = "number";
  horizonInput.min = "1";
  horizonInput.value = String(DEFAULT_HORIZON.annual);
  const confidenceInput = document.createElement("input");
  confidenceInput.name = "confidence";
  confidenceInput.type = "number";
  confidenceInput.step = "0.01";
  confidenceInput.value = "0.95";

  let horizonTouched = false;
  horizonInput.addEventListener("input", () => { horizonTouched = true; });
  levelSel.addEventListener("change", () => {
    if (!horizonTouched) {
      horizonInput.value = String(DEFAULT_HORIZON[levelSel.value] ?? 3);
    }
  });

  const form = document.createElement("form");
  form.className = "fc-form";
  form.appendChild(field("level", "Level", levelSel));
  form.appendChild(field("target", "Target", targetInput));
  form.appendChild(field("model", "Model", modelSel));
  form.appendChild(field("horizon", "Horizon", horizonInput));
  form.appendChild(field("confidence", "Confidence", confidenceInput));
  const button = document.createElement("button");
  button.type = "submit";
  button.textContent = "Run forecast";
  form.appendChild(button);
  root.appendChild(form);

  const banner = div("form-error");
  banner.hidden = true;
  root.appendChild(banner);
  const history = div("fc-history");
  root.appendChild(history);
  const resultBox = div("fc-result");
  root.appendChild(resultBox);

  function clearErrors(): void {
    banner.hidden = true;
    banner.textContent = "";
    for (const err of root.querySelectorAll<HTMLElement>(".field-error")) {
      err.hidden = true;
      err.textContent = "";
    }
  }

  function showError(fault: ApiFault): void {
    const target = fault.body.field
      ? root.querySelector<HTMLElement>(`.field-error[data-field="${fault.body.field}"]`)
      : null;
    if (target) {
      target.textContent = fault.body.message;
      target.hidden = false;
    } else {
      banner.textContent = `${fault.body.code}: ${fault.body.message}`;
      banner.hidden = false;
    }
  }

  async function renderHistory(level: string, target: string): Promise<void> {
    history.replaceChildren();
    if (level === "department" || !target) return;
    try {
      const payload = chronological(await deps.yearlyTotals(target));
      if (payload.charts.length === 0) return;
      const panel = div("history-panel");
      const h = document.createElement("h4");
      const series = payload.charts[0];
      h.textContent = series.unit ? `${series.title} (${series.unit})` : series.title;
      panel.appendChild(h);
      panel.appendChild(renderBar(series));
      history.appendChild(panel);
    } catch {
      // context strip only; the forecast result stands on its own
    }
  }

  async function submit(): Promise<void> {
    clearErrors();
    const formData: ForecastForm = {
      level: levelSel.value,
      target: targetInput.value.trim(),
      model: modelSel.value,
      horizon: Number(horizonInput.value),
      confidence: Number(confidenceInput.value),
    };
    try {
      const result = await deps.forecast(formData);
      resultBox.replaceChildren(
        fitLine(result),
        badges(result),
        forecastChart(result),
        numbersTable(result),
      );
      await renderHistory(formData.level, formData.target);
    } catch (err) {
      resultBox.replaceChildren();
      if (err instanceof ApiFault) {
        showError(err);
      } else {
        banner.textContent = "Could not reach the service. Check the connection and run again.";
        banner.hidden = false;
      }
    }
  }

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void submit();
  });

  function setTarget(level: string, target: string): void {
    levelSel.value = level;
    if (!horizonTouched) {
      horizonInput.value = String(DEFAULT_HORIZON[level] ?? 3);
    }
    targetInput.value = target;
  }

  return { element: root, submit, setTarget };
}
