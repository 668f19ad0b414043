// Shapes of the JSON payloads the service emits. Field names follow the API
// exactly; nothing here is derived client-side.

export interface GeoFeature {
  type: "Feature";
  properties: { NOMBDEP: string };
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface GeoCollection {
  type: "FeatureCollection";
  features: GeoFeature[];
}

export interface MineralTotal {
  quantity: number;
  unit: string;
}

export interface DepartmentStats {
  department: string;
  total_by_mineral: Record<string, MineralTotal>;
  top_mineral: string | null;
  record_count: number;
  years_covered: [number, number];
}

export interface ChartSeries {
  kind: string;
  title: string;
  unit: string;
  labels: string[];
  values: number[];
}

export interface ChartsPayload {
  charts: ChartSeries[];
}

export interface ErrorBody {
  code: string;
  message: string;
  field: string | null;
}

export interface ForecastRequestEcho {
  level: string;
  target: string;
  model: string;
  horizon: number;
  confidence: number;
  seed: number;
}

export interface SeriesUsed {
  n: number;
  span: [string, string];
  frequency: number;
  unit: string;
}

export interface FitSummary {
  family: string;
  aic: number;
  loglik: number;
  notes: string[];
  spec?: { p: number; d: number; q: number };
  [extra: string]: unknown;
}

export interface TestResult {
  test_name: string;
  statistic: number;
  p_value: number;
  df_or_n: number;
}

export interface DiagnosticsPayload {
  alpha: number;
  ljung_box: TestResult | null;
  ljung_box_pass: boolean | null;
  shapiro_wilk: TestResult | null;
  shapiro_wilk_pass: boolean | null;
  errors: string[];
}

export interface ForecastBand {
  horizon: number;
  mean: number[];
  lower: number[];
  upper: number[];
  level: number;
  unit: string;
}

export interface ForecastResponse {
  request: ForecastRequestEcho;
  series_used: SeriesUsed;
  fit: FitSummary;
  diagnostics: DiagnosticsPayload;
  forecast: ForecastBand;
  bootstrap: ForecastBand | null;
}

/** What the forecast form collects before it is sent to /api/forecast. */
export interface ForecastForm {
  level: string;
  target: string;
  model: string;
  horizon: number;
  confidence: number;
}
