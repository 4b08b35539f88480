/** Central UI state with plain observer wiring (no framework). */
import type {
  CoverageEntryPayload,
  CompareResponse,
  GeoJsonPolygon,
  PointPayload,
  RegionRecordPayload,
  SuggestionPayload,
} from "./types.js";

export interface ActiveSelection {
  geojson: GeoJsonPolygon;
  kind: "rectangle" | "freehand";
}

export interface CoverageView {
  /** All entries as returned with threshold=0; slider filters client-side. */
  entries: CoverageEntryPayload[];
  token: string;
  excluded: Set<string>;
  threshold: number;
}

export interface UiState {
  queryText: string;
  parseStatus: "complete" | "partial" | "invalid" | "idle";
  suggestions: SuggestionPayload[];
  widgetOpen: boolean;
  activeSelection: ActiveSelection | null;
  coverageView: CoverageView | null;
  namedRegions: RegionRecordPayload[];
  resultPoints: PointPayload[];
  appliedFilters: string[];
  compareView: CompareResponse | null;
  lastError: string | null;
}

export type Listener = (state: UiState) => void;

export class Store {
  private state: UiState = {
    queryText: "",
    parseStatus: "idle",
    suggestions: [],
    widgetOpen: false,
    activeSelection: null,
    coverageView: null,
    namedRegions: [],
    resultPoints: [],
    appliedFilters: [],
    compareView: null,
    lastError: null,
  };
  private listeners: Listener[] = [];

  get(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Rows the panel shows: score-descending, at or above the slider threshold. */
  visibleCoverageRows(): CoverageEntryPayload[] {
    const view = this.state.coverageView;
    if (!view) return [];
    return view.entries
      .filter((e) => e.score >= view.threshold)
      .slice()
      .sort((a, b) => b.score - a.score || a.geography.localeCompare(b.geography));
  }

  includedGeographies(): string[] {
    const view = this.state.coverageView;
    if (!view) return [];
    return this.visibleCoverageRows()
      .filter((e) => !view.excluded.has(e.geography))
      .map((e) => e.geography);
  }
}
