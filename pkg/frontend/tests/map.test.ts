import { afterEach, beforeEach, describe, expect, it } from "vitest";
import { renderMap } from "../src/map.js";
import { initApp } from "../src/app.js";
import { fmtQuantity } from "../src/format.js";
import type { ChartsPayload, DepartmentStats, GeoCollection } from "../src/types.js";
import { fixture, parseShown, stubFetch, type FetchStub } from "./helpers.js";

const geo = fixture<GeoCollection>("geo");
const departments = fixture<string[]>("departments");
const minerals = fixture<string[]>("minerals");
const statsByDept = fixture<Record<string, DepartmentStats>>("stats_by_department");
const pieByMineral = fixture<ChartsPayload>("chart_pie_by_mineral");
const oroByDepartment = fixture<ChartsPayload>("chart_bar_oro_by_department");

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function baseRoutes(): Record<string, unknown> {
  const routes: Record<string, unknown> = {
    "/api/geo": geo,
    "/api/departments": departments,
    "/api/minerals": minerals,
    "/api/charts/pie?group_by=mineral": pieByMineral,
    "/api/charts/bar?group_by=department&mineral=ORO": oroByDepartment,
  };
  for (const name of departments) {
    routes[`/api/departments/${encodeURIComponent(name)}/stats`] = statsByDept[name];
  }
  return routes;
}

let stub: FetchStub | null = null;
let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.appendChild(root);
});

afterEach(() => {
  stub?.restore();
  stub = null;
  root.remove();
});

describe("renderMap", () => {
  it("draws one clickable region per geo feature", () => {
    const clicks: string[] = [];
    const map = renderMap(geo, (name) => clicks.push(name));
    const paths = map.element.querySelectorAll("path.region");
    expect(paths).toHaveLength(geo.features.length);
    expect(paths).toHaveLength(25);
    const names = [...paths].map((p) => p.getAttribute("data-name"));
    expect(new Set(names)).toEqual(new Set(departments));
    map.regions.get("PUNO")!.dispatchEvent(new MouseEvent("click"));
    expect(clicks).toEqual(["PUNO"]);
  });

  it("every region has a drawable outline", () => {
    const map = renderMap(geo, () => {});
    for (const [name, path] of map.regions) {
      const d = path.getAttribute("d") ?? "";
      expect(d, `path for ${name}`).toMatch(/^M/);
      expect(d).toContain("Z");
    }
  });

  it("shades uniformly without totals and proportionally with them", () => {
    const map = renderMap(geo, () => {});
    const fills = () => [...map.regions.values()].map((p) => p.getAttribute("fill"));
    expect(new Set(fills()).size).toBe(1);

    const series = oroByDepartment.charts[0];
    const totals = new Map(series.labels.map((l, i) => [l, series.values[i]]));
    map.shade(totals);
    expect(new Set(fills()).size).toBeGreaterThan(1);

    map.shade(null);
    expect(new Set(fills()).size).toBe(1);
  });
});

describe("app wiring", () => {
  it("clicking any of the 25 regions pops up exactly the stats payload", async () => {
    stub = stubFetch(baseRoutes());
    await initApp(root);
    const mapSvg = root.querySelector("svg.dept-map")!;
    expect(mapSvg.querySelectorAll("path.region")).toHaveLength(25);

    for (const name of departments) {
      const region = mapSvg.querySelector(`path.region[data-name="${name}"]`)!;
      region.dispatchEvent(new MouseEvent("click"));
      await flush();

      const popup = root.querySelector(".stats-popup")!;
      const stats = statsByDept[name];
      expect(popup.querySelector(".popup-title")!.textContent).toBe(name);
      expect(popup.querySelector(".record-count")!.textContent)
        .toBe(String(stats.record_count));
      expect(popup.querySelector(".top-mineral")!.textContent)
        .toBe(stats.top_mineral ?? "none");
      expect(popup.querySelector(".years")!.textContent)
        .toBe(`${stats.years_covered[0]} to ${stats.years_covered[1]}`);

      const rows = popup.querySelectorAll<HTMLElement>("tr[data-mineral]");
      expect(rows).toHaveLength(Object.keys(stats.total_by_mineral).length);
      for (const row of rows) {
        const mineral = row.dataset.mineral!;
        const total = stats.total_by_mineral[mineral];
        expect(total).toBeDefined();
        const cell = row.querySelector<HTMLElement>(".qty")!;
        expect(cell.textContent).toBe(`${fmtQuantity(total.quantity)} ${total.unit}`);
        // raw payload value rides along untouched
        expect(Number(cell.dataset.quantity)).toBe(total.quantity);
        expect(Math.abs(parseShown(cell.textContent!.replace(` ${total.unit}`, ""))
          - total.quantity)).toBeLessThanOrEqual(0.0005);
      }
    }
  });

  it("renders the no-data state when stats 404", async () => {
    const routes = baseRoutes();
    routes["/api/departments/PUNO/stats"] = {
      status: 404,
      body: { code: "unknown_department", message: "no records for department 'PUNO'", field: "name" },
    };
    stub = stubFetch(routes);
    await initApp(root);
    root.querySelector('path.region[data-name="PUNO"]')!
      .dispatchEvent(new MouseEvent("click"));
    await flush();
    const popup = root.querySelector(".no-data-popup")!;
    expect(popup.textContent).toContain("No production data");
    expect(popup.textContent).toContain("no records for department 'PUNO'");
  });

  it("clicking a region steers the forecast form", async () => {
    stub = stubFetch(baseRoutes());
    await initApp(root);
    root.querySelector('path.region[data-name="PASCO"]')!
      .dispatchEvent(new MouseEvent("click"));
    await flush();
    const level = root.querySelector<HTMLSelectElement>('.fc-form select[name="level"]')!;
    const target = root.querySelector<HTMLInputElement>('.fc-form input[name="target"]')!;
    expect(level.value).toBe("department");
    expect(target.value).toBe("PASCO");
  });

  it("selecting a mineral shades the map from the department chart", async () => {
    stub = stubFetch(baseRoutes());
    await initApp(root);
    const fills = () =>
      [...root.querySelectorAll("path.region")].map((p) => p.getAttribute("fill"));
    expect(new Set(fills()).size).toBe(1);

    const sel = root.querySelector<HTMLSelectElement>('select[name="shade-mineral"]')!;
    sel.value = "ORO";
    sel.dispatchEvent(new Event("change"));
    await flush();
    expect(new Set(fills()).size).toBeGreaterThan(1);

    sel.value = "";
    sel.dispatchEvent(new Event("change"));
    await flush();
    expect(new Set(fills()).size).toBe(1);
  });

  it("shows a retriable banner instead of a blank page when startup fails", async () => {
    stub = stubFetch({ "*": new TypeError("network down") });
    await initApp(root);
    expect(root.querySelector("svg.dept-map")).toBeNull();
    const banner = root.querySelector(".error-banner")!;
    expect(banner.textContent).toContain("Could not load");

    stub.setRoutes(baseRoutes());
    banner.querySelector("button.retry")!.dispatchEvent(new MouseEvent("click"));
    await flush();
    await flush();
    expect(root.querySelector(".error-banner")).toBeNull();
    expect(root.querySelectorAll("path.region")).toHaveLength(25);
  });
});
