import { afterEach, describe, expect, it } from "vitest";
import { ApiFault, api, apiGet, forecastPath } from "../src/api.js";
import type { DepartmentStats } from "../src/types.js";
import { fixture, stubFetch, type FetchStub } from "./helpers.js";

const statsByDept = fixture<Record<string, DepartmentStats>>("stats_by_department");

let stub: FetchStub | null = null;
afterEach(() => {
  stub?.restore();
  stub = null;
});

describe("request dedup", () => {
  it("shares one fetch between concurrent identical requests", async () => {
    stub = stubFetch({ "/api/departments/PASCO/stats": statsByDept.PASCO });
    const [a, b] = await Promise.all([
      api.departmentStats("PASCO"),
      api.departmentStats("PASCO"),
    ]);
    expect(stub.calls).toHaveLength(1);
    expect(a).toEqual(b);
    expect(a.department).toBe("PASCO");
  });

  it("fetches again once the first request has settled", async () => {
    stub = stubFetch({ "/api/departments/PASCO/stats": statsByDept.PASCO });
    await api.departmentStats("PASCO");
    await api.departmentStats("PASCO");
    expect(stub.calls).toHaveLength(2);
  });

  it("does not dedupe distinct paths", async () => {
    stub = stubFetch({
      "/api/departments/PASCO/stats": statsByDept.PASCO,
      "/api/departments/CUSCO/stats": statsByDept.CUSCO,
    });
    const [a, b] = await Promise.all([
      api.departmentStats("PASCO"),
      api.departmentStats("CUSCO"),
    ]);
    expect(stub.calls).toHaveLength(2);
    expect(a.department).not.toBe(b.department);
  });

  it("drops the in-flight entry after a failure so a retry refetches", async () => {
    stub = stubFetch({
      "/api/minerals": { status: 500, body: { code: "boom", message: "x", field: null } },
    });
    await expect(api.minerals()).rejects.toThrow(ApiFault);
    stub.setRoutes({ "/api/minerals": ["COBRE", "ORO"] });
    await expect(api.minerals()).resolves.toEqual(["COBRE", "ORO"]);
    expect(stub.calls).toHaveLength(2);
  });
});

describe("error handling", () => {
  it("carries the service envelope on a 400", async () => {
    const envelope = fixture("error_invalid_confidence");
    stub = stubFetch({ "*": { status: 400, body: envelope } });
    try {
      await apiGet("/api/forecast?confidence=1.5&level=mineral&target=ORO");
      expect.unreachable("should have thrown");
    } catch (err) {
      const fault = err as ApiFault;
      expect(fault).toBeInstanceOf(ApiFault);
      expect(fault.status).toBe(400);
      expect(fault.body.code).toBe("invalid_parameter");
      expect(fault.body.field).toBe("confidence");
      expect(fault.message).toContain("confidence");
    }
  });

  it("synthesizes an envelope when the error body is not JSON", async () => {
    const original = globalThis.fetch;
    globalThis.fetch = (async () =>
      new Response("<html>gateway</html>", { status: 502 })) as typeof fetch;
    try {
      await expect(apiGet("/api/health")).rejects.toMatchObject({
        status: 502,
        body: { code: "http_error" },
      });
    } finally {
      globalThis.fetch = original;
    }
  });
});

describe("forecast path", () => {
  it("builds a stable sorted query", () => {
    const path = forecastPath({
      level: "annual", target: "COBRE", model: "auto", horizon: 5, confidence: 0.95,
    });
    expect(path).toBe(
      "/api/forecast?confidence=0.95&horizon=5&level=annual&model=auto&target=COBRE");
  });

  it("escapes the target", () => {
    const path = forecastPath({
      level: "mineral", target: "ESTAÑO", model: "auto", horizon: 3, confidence: 0.95,
    });
    expect(path).toContain("target=ESTA%C3%91O");
  });
});
