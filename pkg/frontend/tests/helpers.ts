import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

/** Parse one captured API response from tests/fixtures. */
export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name + ".json"), "utf8")) as T;
}

export interface StubRoute {
  status?: number;
  body: unknown;
}

export interface FetchStub {
  calls: string[];
  /** Swap the route table (e.g. to make a failing endpoint recover). */
  setRoutes(routes: Record<string, StubRoute | unknown>): void;
  restore(): void;
}

function toRoute(entry: StubRoute | unknown): StubRoute {
  if (entry && typeof entry === "object" && "body" in (entry as StubRoute)) {
    return entry as StubRoute;
  }
  return { body: entry };
}

/**
 * Replace global fetch with a router over canned payloads. Keys are exact
 * "path?query" strings; a key of "*" catches everything else. A route body
 * of Error makes the call reject like a network failure.
 */
export function stubFetch(routes: Record<string, StubRoute | unknown>): FetchStub {
  const original = globalThis.fetch;
  let table = routes;
  const calls: string[] = [];

  globalThis.fetch = (async (input: RequestInfo | URL) => {
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    calls.push(path);
    const hit = path in table ? table[path] : table["*"];
    if (hit === undefined) {
      return new Response(
        JSON.stringify({ code: "not_found", message: `no stub for ${path}`, field: null }),
        { status: 404, headers: { "content-type": "application/json" } },
      );
    }
    const route = toRoute(hit);
    if (route.body instanceof Error) throw route.body;
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;

  return {
    calls,
    setRoutes(next) { table = next; },
    restore() { globalThis.fetch = original; },
  };
}

/** Numbers rendered as "4,066,670.766" parsed back for traceability checks. */
export function parseShown(text: string): number {
  return Number(text.replace(/,/g, "").replace(/%$/, ""));
}
