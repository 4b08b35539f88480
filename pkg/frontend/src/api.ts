/** Thin typed client over the service's /api endpoints.
 *
 * Every number the UI displays originates from one of these calls; nothing
 * is recomputed client-side.  Autocomplete uses a latest-wins guard so a
 * stale keystroke can never overwrite a newer response.
 */
import type {
  ApiErrorPayload,
  AutocompleteResponse,
  CompareResponse,
  CoverageResponse,
  GeoJsonPolygon,
  HexbinsResponse,
  MetaResponse,
  QueryResponse,
  RegionRecordPayload,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly position?: number;

  constructor(status: number, payload: ApiErrorPayload) {
    super(payload.message || payload.code);
    this.code = payload.code;
    this.status = status;
    this.position = payload.position;
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let payload: ApiErrorPayload = { code: `HTTP${resp.status}`, message: resp.statusText };
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") payload = body;
  } catch {
    /* non-JSON error body; keep the HTTP fallback */
  }
  return new ApiError(resp.status, payload);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async get<T>(path: string, params?: Record<string, string | number>): Promise<T> {
    const query = params
      ? "?" + new URLSearchParams(
          Object.entries(params).map(([k, v]) => [k, String(v)]),
        ).toString()
      : "";
    const resp = await fetch(`${this.baseUrl}/api${path}${query}`);
    if (!resp.ok) throw await parseError(resp);
    return resp.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}/api${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw await parseError(resp);
    return resp.json() as Promise<T>;
  }

  autocomplete(q: string): Promise<AutocompleteResponse> {
    return this.get("/autocomplete", { q });
  }

  meta(): Promise<MetaResponse> {
    return this.get("/meta");
  }

  hexbins(viewport: { west: number; south: number; east: number; north: number },
          zoom: number): Promise<HexbinsResponse> {
    return this.get("/hexbins", { ...viewport, zoom });
  }

  coverage(selection: GeoJsonPolygon, kind: string,
           threshold?: number): Promise<CoverageResponse> {
    const body: Record<string, unknown> = { selection, kind };
    if (threshold !== undefined) body.threshold = threshold;
    return this.post("/coverage", body);
  }

  query(text: string): Promise<QueryResponse> {
    return this.post("/query", { text });
  }

  compare(left: string, right: string): Promise<CompareResponse> {
    return this.post("/compare", { left, right });
  }

  listRegions(): Promise<{ regions: RegionRecordPayload[] }> {
    return this.get("/regions");
  }

  saveRegion(body: {
    name: string;
    selection: GeoJsonPolygon;
    kind: string;
    included: string[];
    coverage_token: string;
  }): Promise<RegionRecordPayload> {
    return this.post("/regions", body);
  }

  async deleteRegion(name: string): Promise<void> {
    const resp = await fetch(
      `${this.baseUrl}/api/regions/${encodeURIComponent(name)}`, { method: "DELETE" });
    if (!resp.ok) throw await parseError(resp);
  }

  removeGeography(name: string, geography: string): Promise<RegionRecordPayload> {
    return this.post(`/regions/${encodeURIComponent(name)}/remove`, { geography });
  }
}

/** Wraps an async producer so only the newest call's result is delivered. */
export function latestWins<A extends unknown[], R>(
  producer: (...args: A) => Promise<R>,
): (...args: A) => Promise<R | undefined> {
  let seq = 0;
  return async (...args: A) => {
    const mine = ++seq;
    const result = await producer(...args);
    return mine === seq ? result : undefined;
  };
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void, waitMs: number,
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) clearTimeout(handle);
    handle = setTimeout(() => fn(...args), waitMs);
  };
}
