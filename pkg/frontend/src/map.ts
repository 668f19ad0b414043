import type { GeoCollection, GeoFeature } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 520;
const HEIGHT = 640;
const PAD = 12;

export interface MapHandle {
  element: SVGSVGElement;
  regions: Map<string, SVGPathElement>;
  /** Fill regions by relative production total; null means uniform shading. */
  shade(totals: Map<string, number> | null): void;
}

type Ring = number[][];

function eachRing(feature: GeoFeature, visit: (ring: Ring) => void): void {
  const geom = feature.geometry;
  if (geom.type === "Polygon") {
    for (const ring of geom.coordinates as Ring[]) visit(ring);
  } else {
    for (const poly of geom.coordinates as Ring[][]) {
      for (const ring of poly) visit(ring);
    }
  }
}

function bounds(geo: GeoCollection): [number, number, number, number] {
  let minLon = Infinity, minLat = Infinity, maxLon = -Infinity, maxLat = -Infinity;
  for (const f of geo.features) {
    eachRing(f, (ring) => {
      for (const [lon, lat] of ring) {
        if (lon < minLon) minLon = lon;
        if (lon > maxLon) maxLon = lon;
        if (lat < minLat) minLat = lat;
        if (lat > maxLat) maxLat = lat;
      }
    });
  }
  return [minLon, minLat, maxLon, maxLat];
}

function pathFor(feature: GeoFeature, box: [number, number, number, number]): string {
  const [minLon, minLat, maxLon, maxLat] = box;
  const sx = (WIDTH - 2 * PAD) / (maxLon - minLon || 1);
  const sy = (HEIGHT - 2 * PAD) / (maxLat - minLat || 1);
  const s = Math.min(sx, sy);
  // north up: SVG y grows downward, latitude grows upward
  const project = (lon: number, lat: number): [number, number] => [
    PAD + (lon - minLon) * s,
    PAD + (maxLat - lat) * s,
  ];
  const d: string[] = [];
  eachRing(feature, (ring) => {
    if (ring.length < 2) return;
    const [x0, y0] = project(ring[0][0], ring[0][1]);
    d.push(`M${x0.toFixed(2)},${y0.toFixed(2)}`);
    for (let i = 1; i < ring.length; i++) {
      const [x, y] = project(ring[i][0], ring[i][1]);
      d.push(`L${x.toFixed(2)},${y.toFixed(2)}`);
    }
    d.push("Z");
  });
  return d.join(" ");
}

const BASE_FILL = "#d8dee4";

function fillFor(t: number): string {
  // light steel to deep blue as t goes 0 -> 1
  const r = Math.round(216 - 166 * t);
  const g = Math.round(222 - 122 * t);
  const b = Math.round(228 - 68 * t);
  return `rgb(${r}, ${g}, ${b})`;
}

export function renderMap(
  geo: GeoCollection,
  onSelect: (name: string) => void,
): MapHandle {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "dept-map");
  svg.setAttribute("role", "img");

  const box = bounds(geo);
  const regions = new Map<string, SVGPathElement>();

  for (const feature of geo.features) {
    const name = feature.properties.NOMBDEP;
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", pathFor(feature, box));
    path.setAttribute("class", "region");
    path.setAttribute("fill", BASE_FILL);
    path.dataset.name = name;
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = name;
    path.appendChild(title);
    path.addEventListener("click", () => onSelect(name));
    svg.appendChild(path);
    regions.set(name, path);
  }

  function shade(totals: Map<string, number> | null): void {
    if (!totals || totals.size === 0) {
      for (const path of regions.values()) path.setAttribute("fill", BASE_FILL);
      return;
    }
    let max = 0;
    for (const v of totals.values()) if (v > max) max = v;
    for (const [name, path] of regions) {
      const v = totals.get(name);
      if (v === undefined || max <= 0) {
        path.setAttribute("fill", BASE_FILL);
      } else {
        path.setAttribute("fill", fillFor(v / max));
      }
    }
  }

  return { element: svg, regions, shade };
}
