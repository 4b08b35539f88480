/** The map-selection widget: hexbin data preview plus draw tools.
 *
 * Hexbin counts are dual-encoded (fill color and hexagon radius).  Rectangle
 * mode drags a box; freehand mode samples pointer positions and simplifies
 * them before submission.  When a drag ends the selection goes straight to
 * POST /api/coverage and the panel re-renders from the response.
 */
import { ApiClient } from "./api.js";
import { clear, countColor, el, svgEl } from "./dom.js";
import { hexSizeForZoom, MapTransform, ringToGeoJson, simplifyPath } from "./geo.js";
import type { Bounds } from "./geo.js";
import type { Store } from "./state.js";
import type { GeoJsonPolygon } from "./types.js";

export const WIDGET_WIDTH = 460;
export const WIDGET_HEIGHT = 300;
export const DEFAULT_ZOOM = 5;
const FREEHAND_TOLERANCE_DEG = 0.15;

export type SelectionHandler = (
  geojson: GeoJsonPolygon, kind: "rectangle" | "freehand",
) => void;

export interface MapWidget {
  root: HTMLElement;
  svg: SVGElement;
  refresh(): Promise<void>;
  setMode(mode: "rectangle" | "freehand"): void;
  mode(): "rectangle" | "freehand";
}

export function createMapWidget(
  api: ApiClient,
  store: Store,
  bounds: Bounds,
  onSelection: SelectionHandler,
  zoom: number = DEFAULT_ZOOM,
): MapWidget {
  const transform = new MapTransform(bounds, WIDGET_WIDTH, WIDGET_HEIGHT);
  const svg = svgEl("svg", {
    class: "map-widget-svg",
    viewBox: `0 0 ${WIDGET_WIDTH} ${WIDGET_HEIGHT}`,
    width: String(WIDGET_WIDTH),
    height: String(WIDGET_HEIGHT),
  });
  const hexLayer = svgEl("g", { class: "hex-layer" });
  const drawLayer = svgEl("g", { class: "draw-layer" });
  svg.append(hexLayer, drawLayer);

  let mode: "rectangle" | "freehand" = "rectangle";
  const rectButton = el("button", { class: "mode-btn active", type: "button" }, "rectangle");
  const freeButton = el("button", { class: "mode-btn", type: "button" }, "freehand");

  function setMode(next: "rectangle" | "freehand"): void {
    mode = next;
    rectButton.className = `mode-btn${mode === "rectangle" ? " active" : ""}`;
    freeButton.className = `mode-btn${mode === "freehand" ? " active" : ""}`;
  }
  rectButton.addEventListener("click", () => setMode("rectangle"));
  freeButton.addEventListener("click", () => setMode("freehand"));

  const root = el(
    "div", { class: "map-widget" },
    el("div", { class: "widget-toolbar" },
       el("span", { class: "widget-title" }, "draw your region"),
       rectButton, freeButton),
  );
  root.append(svg);

  async function refresh(): Promise<void> {
    const resp = await api.hexbins(bounds, zoom);
    clear(hexLayer);
    if (resp.bins.length === 0) return;
    const maxCount = resp.bins[0].count; // server sorts count-descending
    const radiusPx = hexSizeForZoom(bounds, zoom) * transform.pixelsPerProjectedUnit();
    for (const bin of resp.bins) {
      const [cx, cy] = transform.toPixel(bin.lon, bin.lat);
      const scale = 0.35 + 0.65 * (bin.count / maxCount);
      const r = radiusPx * scale;
      const pts: string[] = [];
      for (let k = 0; k < 6; k++) {
        const angle = ((90 + 60 * k) * Math.PI) / 180; // pointy-top
        pts.push(`${cx + r * Math.cos(angle)},${cy - r * Math.sin(angle)}`);
      }
      const hex = svgEl("polygon", {
        points: pts.join(" "),
        fill: countColor(bin.count / maxCount),
        "fill-opacity": "0.85",
        class: "hexbin",
        "data-count": String(bin.count),
      });
      hexLayer.append(hex);
    }
  }

  // -- drawing ---------------------------------------------------------------

  let dragStart: [number, number] | null = null;
  let freehandPath: Array<[number, number]> = [];
  let rubberBand: SVGElement | null = null;

  function pixelOf(ev: MouseEvent): [number, number] {
    const rect = (svg as unknown as { getBoundingClientRect(): DOMRect })
      .getBoundingClientRect();
    const width = rect.width || WIDGET_WIDTH;
    const height = rect.height || WIDGET_HEIGHT;
    return [
      ((ev.clientX - rect.left) / width) * WIDGET_WIDTH,
      ((ev.clientY - rect.top) / height) * WIDGET_HEIGHT,
    ];
  }

  svg.addEventListener("mousedown", (ev) => {
    const [px, py] = pixelOf(ev as MouseEvent);
    dragStart = [px, py];
    freehandPath = [[px, py]];
    clear(drawLayer);
    rubberBand = svgEl(mode === "rectangle" ? "rect" : "polyline", {
      class: "rubber-band",
      fill: "none",
    });
    drawLayer.append(rubberBand);
  });

  svg.addEventListener("mousemove", (ev) => {
    if (!dragStart || !rubberBand) return;
    const [px, py] = pixelOf(ev as MouseEvent);
    if (mode === "rectangle") {
      const [sx, sy] = dragStart;
      rubberBand.setAttribute("x", String(Math.min(sx, px)));
      rubberBand.setAttribute("y", String(Math.min(sy, py)));
      rubberBand.setAttribute("width", String(Math.abs(px - sx)));
      rubberBand.setAttribute("height", String(Math.abs(py - sy)));
    } else {
      freehandPath.push([px, py]);
      rubberBand.setAttribute(
        "points", freehandPath.map(([x, y]) => `${x},${y}`).join(" "));
    }
  });

  svg.addEventListener("mouseup", (ev) => {
    if (!dragStart) return;
    const [px, py] = pixelOf(ev as MouseEvent);
    const start = dragStart;
    dragStart = null;

    if (mode === "rectangle") {
      const [sx, sy] = start;
      if (Math.abs(px - sx) < 3 || Math.abs(py - sy) < 3) return; // click, not drag
      const [lon1, lat1] = transform.toLonLat(Math.min(sx, px), Math.max(sy, py));
      const [lon2, lat2] = transform.toLonLat(Math.max(sx, px), Math.min(sy, py));
      const ring: Array<[number, number]> = [
        [lon1, lat1], [lon2, lat1], [lon2, lat2], [lon1, lat2],
      ];
      onSelection(ringToGeoJson(ring), "rectangle");
    } else {
      freehandPath.push([px, py]);
      const lonLatPath = freehandPath.map(([x, y]) => {
        const [lon, lat] = transform.toLonLat(x, y);
        return [lon, lat] as [number, number];
      });
      const simplified = simplifyPath(lonLatPath, FREEHAND_TOLERANCE_DEG);
      if (simplified.length < 3) return;
      onSelection(ringToGeoJson(simplified), "freehand");
    }
  });

  store.subscribe((state) => {
    root.style.display = state.widgetOpen ? "" : "none";
  });
  root.style.display = store.get().widgetOpen ? "" : "none";

  return { root, svg, refresh, setMode, mode: () => mode };
}
