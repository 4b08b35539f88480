/** Tiny DOM helpers; everything the UI renders goes through these. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** White-to-red ramp used for the score gradient palette. */
export function scoreColor(score: number): string {
  const t = Math.max(0, Math.min(1, score));
  const r = 255;
  const g = Math.round(235 - 175 * t);
  const b = Math.round(205 - 185 * t);
  return `rgb(${r},${g},${b})`;
}

/** Blue-green viridis-like ramp for hexbin counts. */
export function countColor(fraction: number): string {
  const t = Math.max(0, Math.min(1, fraction));
  const r = Math.round(68 + t * (253 - 68));
  const g = Math.round(1 + t * (231 - 1));
  const b = Math.round(84 + t * (37 - 84));
  return `rgb(${r},${g},${b})`;
}
