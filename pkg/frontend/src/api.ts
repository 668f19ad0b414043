import type {
  ChartsPayload,
  DepartmentStats,
  ErrorBody,
  ForecastForm,
  ForecastResponse,
  GeoCollection,
} from "./types.js";

/** A non-2xx response, carrying the service's {code, message, field} body. */
export class ApiFault extends Error {
  constructor(
    public status: number,
    public body: ErrorBody,
  ) {
    super(body.message);
    this.name = "ApiFault";
  }
}

let base = "";

/** Point the client somewhere other than the page origin (used by tests). */
export function setApiBase(url: string): void {
  base = url.replace(/\/$/, "");
}

const inflight = new Map<string, Promise<unknown>>();

async function request<T>(path: string): Promise<T> {
  const res = await fetch(base + path, { headers: { Accept: "application/json" } });
  if (!res.ok) {
    let body: ErrorBody;
    try {
      body = (await res.json()) as ErrorBody;
    } catch {
      body = { code: "http_error", message: `HTTP ${res.status}`, field: null };
    }
    throw new ApiFault(res.status, body);
  }
  return (await res.json()) as T;
}

/**
 * GET with in-flight deduplication: a second call for the same path while
 * the first is still pending shares its promise instead of refetching.
 */
export function apiGet<T>(path: string): Promise<T> {
  const pending = inflight.get(path);
  if (pending) return pending as Promise<T>;
  const p = request<T>(path).finally(() => inflight.delete(path));
  inflight.set(path, p);
  return p;
}

function query(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const key of Object.keys(params).sort()) {
    const v = params[key];
    if (v === undefined || v === "") continue;
    parts.push(`${key}=${encodeURIComponent(String(v))}`);
  }
  return parts.length ? "?" + parts.join("&") : "";
}

export function forecastPath(form: ForecastForm): string {
  return "/api/forecast" + query({
    level: form.level,
    target: form.target,
    model: form.model,
    horizon: form.horizon,
    confidence: form.confidence,
  });
}

export const api = {
  geo: () => apiGet<GeoCollection>("/api/geo"),
  departments: () => apiGet<string[]>("/api/departments"),
  minerals: () => apiGet<string[]>("/api/minerals"),
  departmentStats: (name: string) =>
    apiGet<DepartmentStats>(`/api/departments/${encodeURIComponent(name)}/stats`),
  chart: (kind: "bar" | "pie" | "polygon",
          params: { group_by: string; mineral?: string; bins?: number }) =>
    apiGet<ChartsPayload>(`/api/charts/${kind}` + query(params)),
  forecast: (form: ForecastForm) => apiGet<ForecastResponse>(forecastPath(form)),
};

export type ApiClient = typeof api;
