import type { DepartmentStats } from "./types.js";
import { fmtQuantity } from "./format.js";

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

/**
 * The panel shown after clicking a department. Every figure is a payload
 * field from /api/departments/{name}/stats, formatted but never derived.
 */
export function statsPopup(stats: DepartmentStats): HTMLElement {
  const root = el("div", "popup stats-popup");
  root.appendChild(el("h3", "popup-title", stats.department));

  const table = el("table", "stats-table");
  const head = el("tr");
  head.appendChild(el("th", undefined, "Mineral"));
  head.appendChild(el("th", undefined, "Total"));
  table.appendChild(head);
  for (const [mineral, total] of Object.entries(stats.total_by_mineral)) {
    const row = el("tr");
    row.dataset.mineral = mineral;
    row.appendChild(el("td", undefined, mineral));
    const cell = el("td", "qty", `${fmtQuantity(total.quantity)} ${total.unit}`);
    cell.dataset.quantity = String(total.quantity);
    row.appendChild(cell);
    table.appendChild(row);
  }
  root.appendChild(table);

  const facts = el("dl", "stats-facts");
  const fact = (label: string, value: string, cls: string) => {
    facts.appendChild(el("dt", undefined, label));
    facts.appendChild(el("dd", cls, value));
  };
  fact("Top mineral", stats.top_mineral ?? "none", "top-mineral");
  fact("Records", String(stats.record_count), "record-count");
  fact("Years", `${stats.years_covered[0]} to ${stats.years_covered[1]}`, "years");
  root.appendChild(facts);
  return root;
}

/** Shown when the stats endpoint 404s for a region. */
export function noDataPopup(name: string, message: string): HTMLElement {
  const root = el("div", "popup no-data-popup");
  root.appendChild(el("h3", "popup-title", name));
  root.appendChild(el("p", "no-data", "No production data for this department."));
  root.appendChild(el("p", "detail", message));
  return root;
}
