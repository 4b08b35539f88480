/** Pixel transforms for the map panes.
 *
 * Vertical placement uses sin(lat) so hexagons that are regular in the
 * server's equal-area plane stay regular on screen, and areas read true.
 */

export interface Bounds {
  west: number;
  south: number;
  east: number;
  north: number;
}

const RAD = Math.PI / 180;

export class MapTransform {
  private readonly x0: number;
  private readonly x1: number;
  private readonly y0: number;
  private readonly y1: number;

  constructor(readonly bounds: Bounds, readonly width: number, readonly height: number) {
    this.x0 = bounds.west * RAD;
    this.x1 = bounds.east * RAD;
    this.y0 = Math.sin(bounds.south * RAD);
    this.y1 = Math.sin(bounds.north * RAD);
  }

  toPixel(lon: number, lat: number): [number, number] {
    const px = ((lon * RAD - this.x0) / (this.x1 - this.x0)) * this.width;
    const py = (1 - (Math.sin(lat * RAD) - this.y0) / (this.y1 - this.y0)) * this.height;
    return [px, py];
  }

  toLonLat(px: number, py: number): [number, number] {
    const x = this.x0 + (px / this.width) * (this.x1 - this.x0);
    const yRatio = 1 - py / this.height;
    const y = this.y0 + yRatio * (this.y1 - this.y0);
    const clamped = Math.max(-1, Math.min(1, y));
    return [x / RAD, Math.asin(clamped) / RAD];
  }

  /** Pixels per projected unit horizontally (hex radii arrive in projected units). */
  pixelsPerProjectedUnit(): number {
    return this.width / (this.x1 - this.x0);
  }
}

/** Server-matching hex cell size for a viewport and zoom, in projected units. */
export function hexSizeForZoom(bounds: Bounds, zoom: number): number {
  const width = (bounds.east - bounds.west) * RAD;
  return width / (24 * Math.pow(2, zoom - 3));
}

/** Close an open lon/lat ring and emit a GeoJSON Polygon. */
export function ringToGeoJson(ring: Array<[number, number]>): {
  type: "Polygon";
  coordinates: number[][][];
} {
  const coords = ring.map(([lon, lat]) => [lon, lat]);
  if (coords.length > 0) {
    const [fx, fy] = coords[0];
    const [lx, ly] = coords[coords.length - 1];
    if (fx !== lx || fy !== ly) coords.push([fx, fy]);
  }
  return { type: "Polygon", coordinates: [coords] };
}

/** Drop points closer than `tolerance` (degrees) to the kept predecessor. */
export function simplifyPath(
  path: Array<[number, number]>, tolerance: number,
): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (const p of path) {
    const last = out[out.length - 1];
    if (!last || Math.hypot(p[0] - last[0], p[1] - last[1]) >= tolerance) {
      out.push(p);
    }
  }
  return out;
}
