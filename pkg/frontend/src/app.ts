import { ApiFault, api, type ApiClient } from "./api.js";
import { renderMap, type MapHandle } from "./map.js";
import { statsPopup, noDataPopup } from "./popup.js";
import { renderCharts } from "./charts.js";
import { forecastWorkbench } from "./workbench.js";

export interface ViewState {
  selectedDepartment: string | null;
  selectedMineral: string | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function errorBanner(root: HTMLElement, message: string, retry: () => void): void {
  root.replaceChildren();
  const banner = el("div", "error-banner");
  banner.appendChild(el("p", undefined, message));
  const button = el("button", "retry", "Retry");
  button.addEventListener("click", retry);
  banner.appendChild(button);
  root.appendChild(banner);
}

async function shadeByMineral(map: MapHandle, client: ApiClient, mineral: string | null): Promise<void> {
  if (!mineral) {
    map.shade(null);
    return;
  }
  try {
    const payload = await client.chart("bar", { group_by: "department", mineral });
    const totals = new Map<string, number>();
    for (const series of payload.charts) {
      series.labels.forEach((label, i) => totals.set(label, series.values[i]));
    }
    map.shade(totals);
  } catch {
    map.shade(null);
  }
}

export async function initApp(root: HTMLElement, client: ApiClient = api): Promise<void> {
  const state: ViewState = { selectedDepartment: null, selectedMineral: null };

  let geo, departments, minerals;
  try {
    [geo, departments, minerals] = await Promise.all([
      client.geo(),
      client.departments(),
      client.minerals(),
    ]);
  } catch {
    errorBanner(
      root,
      "Could not load the dataset from the service.",
      () => void initApp(root, client),
    );
    return;
  }

  root.replaceChildren();
  const header = el("header");
  header.appendChild(el("h1", undefined, "Mining production explorer"));
  header.appendChild(el(
    "p", "subtitle",
    `${departments.length} departments, ${minerals.length} minerals on record`,
  ));
  root.appendChild(header);

  const main = el("main", "layout");
  root.appendChild(main);

  // left column: map with mineral shading and the stats popup
  const mapPanel = el("section", "map-panel");
  mapPanel.appendChild(el("h2", undefined, "Where production happens"));

  const shadeRow = el("div", "shade-row");
  const shadeLabel = el("label", undefined, "Shade by mineral ");
  const mineralSel = document.createElement("select");
  mineralSel.name = "shade-mineral";
  mineralSel.appendChild(new Option("none (uniform)", ""));
  for (const m of minerals) mineralSel.appendChild(new Option(m, m));
  shadeLabel.appendChild(mineralSel);
  shadeRow.appendChild(shadeLabel);
  mapPanel.appendChild(shadeRow);

  const popupBox = el("div", "popup-box");
  const workbench = forecastWorkbench({
    forecast: (form) => client.forecast(form),
    yearlyTotals: (mineral) => client.chart("bar", { group_by: "year", mineral }),
  });

  const map = renderMap(geo, (name) => {
    state.selectedDepartment = name;
    workbench.setTarget("department", name);
    client.departmentStats(name).then(
      (stats) => popupBox.replaceChildren(statsPopup(stats)),
      (err) => {
        if (err instanceof ApiFault && err.status === 404) {
          popupBox.replaceChildren(noDataPopup(name, err.body.message));
        } else {
          popupBox.replaceChildren(el("div", "popup popup-error",
            "Could not load department stats. Click the region to retry."));
        }
      },
    );
  });
  mapPanel.appendChild(map.element);
  mapPanel.appendChild(popupBox);
  main.appendChild(mapPanel);

  mineralSel.addEventListener("change", () => {
    state.selectedMineral = mineralSel.value || null;
    void shadeByMineral(map, client, state.selectedMineral);
  });

  // right column: chart explorer and forecast workbench
  const right = el("div", "right-column");

  const chartPanel = el("section", "chart-explorer");
  chartPanel.appendChild(el("h2", undefined, "Chart explorer"));
  const controls = el("form", "chart-controls") as HTMLFormElement;
  const kindSel = document.createElement("select");
  kindSel.name = "kind";
  for (const k of ["bar", "pie", "polygon"]) kindSel.appendChild(new Option(k, k));
  const groupSel = document.createElement("select");
  groupSel.name = "group_by";
  for (const g of ["department", "mineral", "year", "stratum", "stage"]) {
    groupSel.appendChild(new Option(g, g));
  }
  const filterSel = document.createElement("select");
  filterSel.name = "mineral";
  filterSel.appendChild(new Option("all minerals", ""));
  for (const m of minerals) filterSel.appendChild(new Option(m, m));
  const binsInput = document.createElement("input");
  binsInput.name = "bins";
  binsInput.type = "number";
  binsInput.min = "1";
  binsInput.placeholder = "bins (auto)";
  const chartButton = el("button", undefined, "Draw");
  chartButton.setAttribute("type", "submit");
  for (const [label, control] of [
    ["Kind ", kindSel], ["Group by ", groupSel],
    ["Mineral ", filterSel], ["Bins ", binsInput],
  ] as Array<[string, HTMLElement]>) {
    const wrap = el("label", undefined, label);
    wrap.appendChild(control);
    controls.appendChild(wrap);
  }
  controls.appendChild(chartButton);
  chartPanel.appendChild(controls);
  const chartBox = el("div", "chart-box");
  chartPanel.appendChild(chartBox);

  async function drawCharts(): Promise<void> {
    const kind = kindSel.value as "bar" | "pie" | "polygon";
    const params: { group_by: string; mineral?: string; bins?: number } = {
      group_by: groupSel.value,
    };
    if (filterSel.value) params.mineral = filterSel.value;
    if (kind === "polygon" && binsInput.value) params.bins = Number(binsInput.value);
    try {
      chartBox.replaceChildren(renderCharts(await client.chart(kind, params)));
    } catch (err) {
      const message = err instanceof ApiFault
        ? `${err.body.code}: ${err.body.message}`
        : "Could not reach the service.";
      chartBox.replaceChildren(el("div", "chart-error", message));
    }
  }
  controls.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void drawCharts();
  });
  right.appendChild(chartPanel);

  const wbPanel = el("section", "workbench-panel");
  wbPanel.appendChild(el("h2", undefined, "Forecast workbench"));
  wbPanel.appendChild(workbench.element);
  right.appendChild(wbPanel);

  main.appendChild(right);

  // first paint: overview pie plus an initial shading pass
  kindSel.value = "pie";
  groupSel.value = "mineral";
  await drawCharts();
}
