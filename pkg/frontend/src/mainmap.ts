/** The main result map and the compare-statistics tables. */
import { clear, el, svgEl } from "./dom.js";
import { MapTransform } from "./geo.js";
import type { Bounds } from "./geo.js";
import type { Store } from "./state.js";
import type { StatsPayload } from "./types.js";

export const MAP_WIDTH = 640;
export const MAP_HEIGHT = 400;

export interface MainMap {
  root: HTMLElement;
  render(): void;
}

function statsTable(stats: StatsPayload): HTMLElement {
  const fmt = (v: number | null) => (v === null ? "—" : v.toFixed(2));
  return el(
    "table", { class: "stats-table", "data-region": stats.name },
    el("caption", {}, stats.name),
    el("tr", {}, el("th", {}, "count"), el("td", {}, String(stats.count))),
    el("tr", {}, el("th", {}, "min"), el("td", {}, fmt(stats.min))),
    el("tr", {}, el("th", {}, "max"), el("td", {}, fmt(stats.max))),
    el("tr", {}, el("th", {}, "mean"), el("td", {}, fmt(stats.mean))),
  );
}

export function createMainMap(store: Store, bounds: Bounds): MainMap {
  const transform = new MapTransform(bounds, MAP_WIDTH, MAP_HEIGHT);
  const svg = svgEl("svg", {
    class: "main-map-svg",
    viewBox: `0 0 ${MAP_WIDTH} ${MAP_HEIGHT}`,
    width: String(MAP_WIDTH),
    height: String(MAP_HEIGHT),
  });
  const pointLayer = svgEl("g", { class: "result-points" });
  svg.append(pointLayer);

  const filterBar = el("div", { class: "filter-bar" });
  const compareArea = el("div", { class: "compare-area" });
  const root = el("div", { class: "main-map" }, filterBar);
  root.append(svg);
  root.append(compareArea);

  function render(): void {
    const state = store.get();

    clear(filterBar);
    for (const f of state.appliedFilters) {
      filterBar.append(el("span", { class: "filter-chip" }, f));
    }

    clear(pointLayer);
    for (const p of state.resultPoints) {
      const [cx, cy] = transform.toPixel(p.lon, p.lat);
      const dot = svgEl("circle", {
        cx: String(cx),
        cy: String(cy),
        r: String(1.5 + p.magnitude * 0.45),
        class: "result-point",
        "data-id": p.id,
      });
      pointLayer.append(dot);
    }

    clear(compareArea);
    if (state.compareView) {
      compareArea.append(
        statsTable(state.compareView.left),
        statsTable(state.compareView.right),
      );
    }
  }

  store.subscribe(render);
  render();
  return { root, render };
}
