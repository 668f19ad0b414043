import type { ChartSeries, ChartsPayload } from "./types.js";
import { fmtAxis, fmtQuantity, fmtShare } from "./format.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const PALETTE = [
  "#3465a4", "#cc4125", "#6aa84f", "#e69138", "#8e7cc3",
  "#45818e", "#a64d79", "#bf9000", "#674ea7", "#85200c",
];

function div(className: string, text?: string): HTMLDivElement {
  const node = document.createElement("div");
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Horizontal bars in payload order; the API already sorts them. */
export function renderBar(series: ChartSeries): HTMLElement {
  const root = div("chart bar-chart");
  let max = 0;
  for (const v of series.values) if (v > max) max = v;
  series.labels.forEach((label, i) => {
    const row = div("bar-row");
    row.dataset.label = label;
    row.appendChild(div("bar-label", label));
    const track = div("bar-track");
    const fill = div("bar-fill");
    fill.style.width = max > 0 ? `${(100 * series.values[i]) / max}%` : "0%";
    fill.style.background = PALETTE[i % PALETTE.length];
    track.appendChild(fill);
    row.appendChild(track);
    const value = div("bar-value", fmtQuantity(series.values[i]));
    value.dataset.value = String(series.values[i]);
    row.appendChild(value);
    root.appendChild(row);
  });
  return root;
}

function arcPath(startFrac: number, endFrac: number): string {
  const a0 = 2 * Math.PI * startFrac - Math.PI / 2;
  const a1 = 2 * Math.PI * endFrac - Math.PI / 2;
  const x0 = Math.cos(a0), y0 = Math.sin(a0);
  const x1 = Math.cos(a1), y1 = Math.sin(a1);
  const large = endFrac - startFrac > 0.5 ? 1 : 0;
  return `M0,0 L${x0.toFixed(5)},${y0.toFixed(5)} ` +
    `A1,1 0 ${large} 1 ${x1.toFixed(5)},${y1.toFixed(5)} Z`;
}

/** Pie slices; payload values are shares that already sum to 100. */
export function renderPie(series: ChartSeries): HTMLElement {
  const root = div("chart pie-chart");
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "-1.05 -1.05 2.1 2.1");
  svg.setAttribute("class", "pie");

  let at = 0;
  series.values.forEach((value, i) => {
    const frac = value / 100;
    let slice: SVGElement;
    if (frac >= 0.999999) {
      // a lone 100% share degenerates as an arc, draw the full disc
      slice = document.createElementNS(SVG_NS, "circle");
      slice.setAttribute("r", "1");
    } else {
      slice = document.createElementNS(SVG_NS, "path");
      slice.setAttribute("d", arcPath(at, at + frac));
    }
    slice.setAttribute("class", "slice");
    slice.setAttribute("fill", PALETTE[i % PALETTE.length]);
    (slice as SVGElement & { dataset: DOMStringMap }).dataset.label = series.labels[i];
    svg.appendChild(slice);
    at += frac;
  });
  root.appendChild(svg);

  const legend = document.createElement("ul");
  legend.className = "legend";
  series.labels.forEach((label, i) => {
    const item = document.createElement("li");
    item.dataset.label = label;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = PALETTE[i % PALETTE.length];
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(`${label} `));
    const share = document.createElement("span");
    share.className = "share";
    share.textContent = fmtShare(series.values[i]);
    share.dataset.value = String(series.values[i]);
    item.appendChild(share);
    legend.appendChild(item);
  });
  root.appendChild(legend);
  return root;
}

/**
 * Frequency polygon: one polyline vertex per payload value. The service
 * zero-pads both ends, so n bins arrive as n+2 points and the line closes
 * to the axis on its own.
 */
export function renderPolygon(series: ChartSeries): HTMLElement {
  const root = div("chart polygon-chart");
  const width = 420, height = 180, pad = 8;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "polygon");

  let max = 0;
  for (const v of series.values) if (v > max) max = v;
  const n = series.values.length;
  const step = n > 1 ? (width - 2 * pad) / (n - 1) : 0;
  const points = series.values
    .map((v, i) => {
      const x = pad + i * step;
      const y = height - pad - (max > 0 ? (v / max) * (height - 2 * pad) : 0);
      return `${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points);
  line.setAttribute("class", "polygon-line");
  line.setAttribute("fill", "none");
  svg.appendChild(line);
  root.appendChild(svg);

  const axis = div("polygon-axis");
  axis.appendChild(div("axis-start", fmtAxis(series.labels[0] ?? "")));
  axis.appendChild(div("axis-end", fmtAxis(series.labels[n - 1] ?? "")));
  root.appendChild(axis);
  return root;
}

const RENDERERS: Record<string, (s: ChartSeries) => HTMLElement> = {
  Bar: renderBar,
  Pie: renderPie,
  FrequencyPolygon: renderPolygon,
};

/** One panel per series in the payload (the API splits mixed units). */
export function renderCharts(payload: ChartsPayload): HTMLElement {
  const root = div("charts");
  if (payload.charts.length === 0) {
    root.appendChild(div("empty-state", "No data for this selection."));
    return root;
  }
  for (const series of payload.charts) {
    const panel = div("chart-panel");
    const caption = series.unit ? `${series.title} (${series.unit})` : series.title;
    const h = document.createElement("h4");
    h.textContent = caption;
    panel.appendChild(h);
    const render = RENDERERS[series.kind] ?? renderBar;
    panel.appendChild(render(series));
    root.appendChild(panel);
  }
  return root;
}
