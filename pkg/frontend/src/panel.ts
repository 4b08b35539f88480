/** Coverage panel: the ranked geography list for the active selection.
 *
 * Rows are sorted by confidence score (highest first) on a gradient palette.
 * Every number shown comes from the /api/coverage response; the threshold
 * slider and the per-row remove toggles only re-filter that response
 * client-side.  Naming and saving posts the curated set to /api/regions.
 */
import { ApiClient, ApiError } from "./api.js";
import { clear, el, scoreColor } from "./dom.js";
import type { Store } from "./state.js";

export interface CoveragePanel {
  root: HTMLElement;
  render(): void;
}

export function createCoveragePanel(
  api: ApiClient,
  store: Store,
  onRegionSaved: (name: string) => void,
): CoveragePanel {
  const rows = el("div", { class: "coverage-rows" });
  const slider = el("input", {
    type: "range", min: "0", max: "1", step: "0.05", value: "0.2",
    class: "threshold-slider", "aria-label": "score threshold",
  });
  const sliderLabel = el("span", { class: "threshold-label" }, "threshold 0.20");
  const nameField = el("input", {
    type: "text", class: "region-name", placeholder: "name this region",
    "aria-label": "region name",
  });
  const saveButton = el("button", { class: "save-region", type: "button" }, "save region");
  const message = el("div", { class: "panel-message" });

  const root = el(
    "div", { class: "coverage-panel" },
    el("h3", {}, "covered geographies"),
    el("div", { class: "threshold-row" }, sliderLabel, slider),
    rows,
    el("div", { class: "save-row" }, nameField, saveButton),
    message,
  );

  function render(): void {
    clear(rows);
    const view = store.get().coverageView;
    if (!view) {
      rows.append(el("div", { class: "empty" }, "draw a selection to see coverage"));
      return;
    }
    for (const entry of store.visibleCoverageRows()) {
      const excluded = view.excluded.has(entry.geography);
      const toggle = el(
        "button",
        { class: "row-toggle", type: "button", title: "remove from region" },
        excluded ? "+" : "×",
      );
      toggle.addEventListener("click", () => {
        const next = new Set(view.excluded);
        if (excluded) next.delete(entry.geography);
        else next.add(entry.geography);
        store.update({ coverageView: { ...view, excluded: next } });
      });
      const row = el(
        "div",
        { class: `coverage-row${excluded ? " excluded" : ""}`, "data-geography": entry.geography },
        el("span", { class: "geo-name" }, entry.geography),
        el("span", { class: "geo-score" }, entry.score.toFixed(3)),
        el("span", { class: "geo-parts" },
           `area ${(entry.p_area * 100).toFixed(0)}% · points ${(entry.p_points * 100).toFixed(0)}%`),
        toggle,
      );
      row.style.background = scoreColor(entry.score);
      rows.append(row);
    }
  }

  slider.addEventListener("input", () => {
    const view = store.get().coverageView;
    const threshold = Number(slider.value);
    sliderLabel.textContent = `threshold ${threshold.toFixed(2)}`;
    if (view) store.update({ coverageView: { ...view, threshold } });
  });

  saveButton.addEventListener("click", () => void save());

  async function save(): Promise<void> {
    const state = store.get();
    const view = state.coverageView;
    const selection = state.activeSelection;
    if (!view || !selection) {
      message.textContent = "nothing to save yet";
      return;
    }
    const name = nameField.value.trim();
    if (!name) {
      message.textContent = "give the region a name first";
      return;
    }
    try {
      await api.saveRegion({
        name,
        selection: selection.geojson,
        kind: selection.kind,
        included: store.includedGeographies(),
        coverage_token: view.token,
      });
    } catch (err) {
      message.textContent = err instanceof ApiError ? err.message : String(err);
      return;
    }
    message.textContent = `saved “${name}”`;
    nameField.value = "";
    onRegionSaved(name);
  }

  store.subscribe(render);
  render();
  return { root, render };
}
