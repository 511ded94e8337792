/** Minimal SVG document builder: no DOM, just well-formed strings. */

export interface Extent {
  min: number;
  max: number;
}

export function extentOf(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!Number.isFinite(min)) return { min: 0, max: 1 };
  if (min === max) return { min: min - 0.5, max: max + 0.5 };
  return { min, max };
}

/** Affine map from a data extent onto [lo, hi] in pixels. */
export function scale(ext: Extent, lo: number, hi: number) {
  const span = ext.max - ext.min;
  return (v: number) => lo + ((v - ext.min) / span) * (hi - lo);
}

const fmt = (v: number) => (Math.abs(v) < 1e-12 ? "0" : v.toFixed(2).replace(/\.?0+$/, ""));

export class Svg {
  readonly width: number;
  readonly height: number;
  private parts: string[] = [];

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
  }

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  polyline(points: [number, number][], stroke: string, width = 1.2, fill = "none"): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    this.add(`<polyline points="${pts}" fill="${fill}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  polygon(points: [number, number][], fill: string, stroke = "#333", width = 0.4): void {
    const pts = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    this.add(`<polygon points="${pts}" fill="${fill}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#999", width = 0.8): void {
    this.add(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" y2="${y2.toFixed(2)}" stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  text(x: number, y: number, content: string, size = 11, anchor = "middle"): void {
    this.add(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" font-size="${size}" font-family="sans-serif" text-anchor="${anchor}">${escapeXml(content)}</text>`
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.add(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" height="${h.toFixed(2)}" fill="${fill}" stroke="${stroke}"/>`
    );
  }

  /** Frame with tick labels at the extent corners. */
  axes(x0: number, y0: number, x1: number, y1: number, xe: Extent, ye: Extent, xl: string, yl: string): void {
    this.add(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`
    );
    this.text(x0, y0 + 14, fmt(xe.min), 10);
    this.text(x1, y0 + 14, fmt(xe.max), 10);
    this.text((x0 + x1) / 2, y0 + 26, xl, 11);
    this.text(x0 - 6, y0, fmt(ye.min), 10, "end");
    this.text(x0 - 6, y1 + 8, fmt(ye.max), 10, "end");
    this.text(x0 - 28, (y0 + y1) / 2, yl, 11);
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export const BAND_COLORS = [
  "#2166ac",
  "#b2182b",
  "#1b7837",
  "#762a83",
  "#e08214",
  "#35978f",
  "#c51b7d",
  "#4d4d4d",
];

export function bandColor(index: number): string {
  return BAND_COLORS[index % BAND_COLORS.length];
}
