/** Application wiring: input, widget, main map, and coverage panel.
 *
 * The interactive loop: type a query; a partial spatial clause opens the
 * widget; draw a selection; the ranked panel renders from /api/coverage;
 * curate and save the region under a name; the name immediately resolves in
 * later queries (autocomplete round-trips through the server).
 */
import { ApiClient, ApiError } from "./api.js";
import { createAutocomplete } from "./autocomplete.js";
import { el } from "./dom.js";
import { createMainMap } from "./mainmap.js";
import { createCoveragePanel } from "./panel.js";
import { Store } from "./state.js";
import { createMapWidget } from "./widget.js";
import type { GeoJsonPolygon } from "./types.js";

export interface App {
  root: HTMLElement;
  store: Store;
  api: ApiClient;
  widget: ReturnType<typeof createMapWidget>;
  autocomplete: ReturnType<typeof createAutocomplete>;
  panel: ReturnType<typeof createCoveragePanel>;
  submitQuery(text: string): Promise<void>;
  handleSelection(geojson: GeoJsonPolygon, kind: "rectangle" | "freehand"): Promise<void>;
}

export async function createApp(
  container: HTMLElement, baseUrl: string = "",
): Promise<App> {
  const api = new ApiClient(baseUrl);
  const store = new Store();
  const meta = await api.meta();
  const errorBar = el("div", { class: "error-bar" });

  function showError(err: unknown): void {
    errorBar.textContent =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  }

  async function submitQuery(text: string): Promise<void> {
    errorBar.textContent = "";
    try {
      const result = await api.query(text);
      if (result.kind === "compare") {
        store.update({ compareView: result, resultPoints: [], appliedFilters: [] });
      } else {
        store.update({
          compareView: null,
          resultPoints: result.points,
          appliedFilters: result.filters,
        });
      }
    } catch (err) {
      showError(err);
    }
  }

  async function handleSelection(
    geojson: GeoJsonPolygon, kind: "rectangle" | "freehand",
  ): Promise<void> {
    errorBar.textContent = "";
    try {
      // fetch unfiltered so the threshold slider can re-filter client-side
      const coverage = await api.coverage(geojson, kind, 0);
      store.update({
        activeSelection: { geojson, kind },
        coverageView: {
          entries: coverage.entries,
          token: coverage.token,
          excluded: new Set<string>(),
          threshold: 0.2,
        },
      });
    } catch (err) {
      showError(err);
    }
  }

  const autocomplete = createAutocomplete(api, store, (text) => void submitQuery(text));
  const widget = createMapWidget(
    api, store, meta.bounds,
    (geojson, kind) => void handleSelection(geojson, kind));
  const panel = createCoveragePanel(api, store, () => void autocomplete.refresh());
  const mainMap = createMainMap(store, meta.bounds);

  const root = el(
    "div", { class: "app" },
    el("header", { class: "app-header" },
       el("h1", {}, "georegion"),
       el("span", { class: "meta-line" },
          `${meta.point_count} points · ${meta.geography_names.length} geographies`)),
    autocomplete.root,
    errorBar,
    el("div", { class: "app-body" },
       el("div", { class: "left-col" }, widget.root, panel.root),
       mainMap.root),
  );
  container.append(root);
  await widget.refresh();

  return { root, store, api, widget, autocomplete, panel, submitQuery, handleSelection };
}
