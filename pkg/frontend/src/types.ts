/** Payload shapes of the /api endpoints (mirrors the service contract). */

export interface SuggestionPayload {
  kind: "text" | "widget";
  rank: number;
  text?: string;
}

export interface AutocompleteResponse {
  status: "complete" | "partial" | "invalid";
  suggestions: SuggestionPayload[];
  widget: "map" | null;
}

export interface CoverageEntryPayload {
  geography: string;
  p_area: number;
  p_points: number;
  score: number;
}

export interface CoverageResponse {
  entries: CoverageEntryPayload[];
  token: string;
}

export interface HexBinPayload {
  lon: number;
  lat: number;
  count: number;
}

export interface HexbinsResponse {
  bins: HexBinPayload[];
}

export interface PointPayload {
  id: string;
  lon: number;
  lat: number;
  magnitude: number;
  time: string;
  geography: string;
}

export interface StatsPayload {
  name: string;
  count: number;
  min: number | null;
  max: number | null;
  mean: number | null;
}

export interface ShowResponse {
  kind: "show";
  points: PointPayload[];
  filters: string[];
}

export interface CompareResponse {
  kind: "compare";
  left: StatsPayload;
  right: StatsPayload;
}

export type QueryResponse = ShowResponse | CompareResponse;

export interface RegionEntryPayload {
  geography: string;
  p_area: number;
  p_points: number;
  score: number;
  included: boolean;
}

export interface RegionRecordPayload {
  name: string;
  created_at: string;
  last_used_at: string;
  kind: string;
  selection: GeoJsonPolygon;
  config: { weight_area: number; weight_points: number; threshold: number };
  entries: RegionEntryPayload[];
}

export interface MetaResponse {
  bounds: { west: number; south: number; east: number; north: number };
  point_count: number;
  geography_names: string[];
  descriptor_thresholds: { large: number; small: number; recent: string };
}

export interface GeoJsonPolygon {
  type: "Polygon";
  coordinates: number[][][];
}

export interface ApiErrorPayload {
  code: string;
  message: string;
  position?: number;
}
