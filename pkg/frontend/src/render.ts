/**
 * SVG renderers for the four emission kinds.
 *
 * Pure presentation: renderers read the loaded arrays and never write
 * to them; callers can re-digest the data afterwards to verify.  The
 * Fermi window defaults to [-pi/2, 3pi/2)^2, the usual display domain
 * for honeycomb-family Fermi curves; it is overridable.
 */

import {
  BandsData,
  DosData,
  FermiData,
  PolytopeData,
  SchemaError,
} from "./schema.js";
import { Svg, bandColor, extentOf, scale } from "./svg.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  /** Fermi display window start (both axes); defaults to -pi/2. */
  windowStart?: number;
}

const MARGIN = 46;

// ---------------------------------------------------------------------
// bloch: band structure (1-D curves, 2-D isometric surfaces)
// ---------------------------------------------------------------------

export function renderBloch(data: BandsData, opts: RenderOptions = {}): string {
  if (data.dim === 1) return renderBands1d(data, opts);
  if (data.dim === 2) return renderBands2d(data, opts);
  throw new SchemaError(`bloch renderer supports d = 1 or 2, got d = ${data.dim}`);
}

function renderBands1d(data: BandsData, opts: RenderOptions): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const svg = new Svg(width, height);
  const ks = data.rows.map((r) => r[0]);
  const all = data.rows.flatMap((r) => r.slice(1));
  const xe = extentOf(ks);
  const ye = extentOf(all);
  const sx = scale(xe, MARGIN, width - MARGIN);
  const sy = scale(ye, height - MARGIN, MARGIN);
  for (let b = 0; b < data.nBands; b++) {
    const pts = data.rows.map(
      (r) => [sx(r[0]), sy(r[1 + b])] as [number, number]
    );
    svg.polyline(pts, bandColor(b), 1.6);
  }
  svg.axes(MARGIN, height - MARGIN, width - MARGIN, MARGIN, xe, ye, "k", "energy");
  return svg.toString();
}

interface Quad {
  depth: number;
  corners: [number, number][];
  fill: string;
}

function renderBands2d(data: BandsData, opts: RenderOptions): string {
  const width = opts.width ?? 720;
  const height = opts.height ?? 560;
  const svg = new Svg(width, height);
  const k1s = [...new Set(data.rows.map((r) => r[0]))].sort((a, b) => a - b);
  const k2s = [...new Set(data.rows.map((r) => r[1]))].sort((a, b) => a - b);
  const g1 = k1s.length;
  const g2 = k2s.length;
  if (g1 * g2 !== data.rows.length) {
    throw new SchemaError("bands.csv rows do not form a full tensor grid");
  }
  // rows are emitted with k2 fastest
  const value = (i: number, j: number, b: number) => data.rows[i * g2 + j][2 + b];

  const all = data.rows.flatMap((r) => r.slice(2));
  const ye = extentOf(all);
  const zscale = (0.55 * (2 * Math.PI)) / (ye.max - ye.min);
  const iso = (k1: number, k2: number, lam: number): [number, number, number] => {
    const x = (k1 - k2) * Math.cos(Math.PI / 6);
    const y = (k1 + k2) * Math.sin(Math.PI / 6) - (lam - ye.min) * zscale;
    const depth = k1 + k2 + 0.25 * (lam - ye.min) * zscale;
    return [x, y, depth];
  };

  const stride = Math.max(1, Math.ceil(Math.max(g1, g2) / 56));
  const quads: Quad[] = [];
  for (let b = 0; b < data.nBands; b++) {
    for (let i = 0; i + stride < g1 + 1; i += stride) {
      for (let j = 0; j + stride < g2 + 1; j += stride) {
        const i2 = Math.min(i + stride, g1 - 1);
        const j2 = Math.min(j + stride, g2 - 1);
        if (i === i2 || j === j2) continue;
        const cs: [number, number, number][] = [
          iso(k1s[i], k2s[j], value(i, j, b)),
          iso(k1s[i2], k2s[j], value(i2, j, b)),
          iso(k1s[i2], k2s[j2], value(i2, j2, b)),
          iso(k1s[i], k2s[j2], value(i, j2, b)),
        ];
        const mean =
          (value(i, j, b) + value(i2, j, b) + value(i2, j2, b) + value(i, j2, b)) / 4;
        const t = (mean - ye.min) / (ye.max - ye.min);
        quads.push({
          depth: (cs[0][2] + cs[1][2] + cs[2][2] + cs[3][2]) / 4,
          corners: cs.map(([x, y]) => [x, y] as [number, number]),
          fill: lighten(bandColor(b), 0.25 + 0.45 * t),
        });
      }
    }
  }
  quads.sort((a, b) => a.depth - b.depth);

  const xs = quads.flatMap((q) => q.corners.map((c) => c[0]));
  const ys = quads.flatMap((q) => q.corners.map((c) => c[1]));
  const xe2 = extentOf(xs);
  const ye2 = extentOf(ys);
  const sx = scale(xe2, MARGIN, width - MARGIN);
  const sy = scale(ye2, height - MARGIN, MARGIN);
  for (const q of quads) {
    svg.polygon(
      q.corners.map(([x, y]) => [sx(x), sy(y)] as [number, number]),
      q.fill,
      "#00000022",
      0.3
    );
  }
  svg.text(width / 2, height - 12, "band surfaces over the momentum torus", 12);
  return svg.toString();
}

function lighten(hex: string, t: number): string {
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  const mix = (c: number) => Math.round(c + (255 - c) * t);
  return `rgb(${mix(r)},${mix(g)},${mix(b)})`;
}

// ---------------------------------------------------------------------
// fermi: level curves in the display window
// ---------------------------------------------------------------------

export function renderFermi(data: FermiData, opts: RenderOptions = {}): string {
  const width = opts.width ?? 520;
  const height = opts.height ?? 520;
  const w0 = opts.windowStart ?? -Math.PI / 2;
  const svg = new Svg(width, height);
  const xe = { min: w0, max: w0 + 2 * Math.PI };
  const sx = scale(xe, MARGIN, width - MARGIN);
  const sy = scale(xe, height - MARGIN, MARGIN);
  const wrap = (v: number) => {
    let t = (v - w0) % (2 * Math.PI);
    if (t < 0) t += 2 * Math.PI;
    return t + w0;
  };

  let drew = false;
  data.curves.forEach((curve, ci) => {
    // split the polyline wherever wrapping makes it jump across the window
    let run: [number, number][] = [];
    let prev: [number, number] | null = null;
    const flush = () => {
      if (run.length > 1) {
        svg.polyline(run, bandColor(ci), 1.6);
        drew = true;
      }
      run = [];
    };
    for (const v of curve) {
      const p: [number, number] = [wrap(v[0]), wrap(v[1])];
      if (prev && (Math.abs(p[0] - prev[0]) > Math.PI || Math.abs(p[1] - prev[1]) > Math.PI)) {
        flush();
      }
      run.push([sx(p[0]), sy(p[1])]);
      prev = p;
    }
    flush();
  });
  for (const p of data.points) {
    svg.circle(sx(wrap(p[0])), sy(wrap(p[1])), 4, "#b2182b");
    drew = true;
  }
  svg.axes(
    MARGIN,
    height - MARGIN,
    width - MARGIN,
    MARGIN,
    xe,
    xe,
    "k1",
    "k2"
  );
  const lam = data.lambda0[1] === 0 ? `${data.lambda0[0]}` : `${data.lambda0[0]}+${data.lambda0[1]}i`;
  svg.text(width / 2, 18, `Fermi section at energy ${lam}`, 12);
  if (!drew) {
    svg.text(width / 2, height / 2, "empty section", 16);
  }
  if (data.curveKind === "abs-threshold") {
    svg.text(width / 2, 32, "(|D| threshold contours: lower confidence)", 10);
  }
  return svg.toString();
}

// ---------------------------------------------------------------------
// dos: histogram
// ---------------------------------------------------------------------

export function renderDos(data: DosData, opts: RenderOptions = {}): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 400;
  const svg = new Svg(width, height);
  if (data.centers.length === 0) {
    throw new SchemaError("dos.csv has no bins");
  }
  const xe = extentOf(data.centers);
  const ye = { min: 0, max: extentOf(data.densities).max };
  const sx = scale(xe, MARGIN, width - MARGIN);
  const sy = scale(ye, height - MARGIN, MARGIN);
  const step =
    data.centers.length > 1 ? data.centers[1] - data.centers[0] : 1.0;
  for (let i = 0; i < data.centers.length; i++) {
    const x0 = sx(data.centers[i] - step / 2);
    const x1 = sx(data.centers[i] + step / 2);
    const y = sy(data.densities[i]);
    svg.rect(x0, y, x1 - x0, sy(0) - y, "#74a9cf", "#2b5d8a");
  }
  svg.axes(MARGIN, height - MARGIN, width - MARGIN, MARGIN, xe, ye, "energy", "density");
  return svg.toString();
}

// ---------------------------------------------------------------------
// polytope: Newton polytope with visible facets
// ---------------------------------------------------------------------

export function renderPolytope(data: PolytopeData, opts: RenderOptions = {}): string {
  const width = opts.width ?? 560;
  const height = opts.height ?? 560;
  const svg = new Svg(width, height);
  const ambient = data.support[0]?.length ?? 0;
  if (ambient === 2) {
    render2dPolytope(svg, data, width, height);
  } else if (ambient === 3) {
    render3dPolytope(svg, data, width, height);
  } else {
    throw new SchemaError(`polytope renderer supports ambient dimension 2 or 3, got ${ambient}`);
  }
  svg.text(
    width / 2,
    height - 12,
    `normalized volume ${data.normalizedVolume}` + (data.degenerate ? " (degenerate)" : ""),
    12
  );
  return svg.toString();
}

function render2dPolytope(svg: Svg, data: PolytopeData, width: number, height: number): void {
  const xe = extentOf(data.support.map((p) => p[0]));
  const ye = extentOf(data.support.map((p) => p[1]));
  const sx = scale({ min: xe.min - 0.5, max: xe.max + 0.5 }, MARGIN, width - MARGIN);
  const sy = scale({ min: ye.min - 0.5, max: ye.max + 0.5 }, height - MARGIN, MARGIN);
  if (data.hullVertices.length >= 3) {
    const c = centroid(data.hullVertices);
    const ordered = [...data.hullVertices].sort(
      (a, b) =>
        Math.atan2(a[1] - c[1], a[0] - c[0]) - Math.atan2(b[1] - c[1], b[0] - c[0])
    );
    svg.polygon(
      ordered.map((p) => [sx(p[0]), sy(p[1])] as [number, number]),
      "#d1e5f0",
      "#2166ac",
      1.4
    );
  }
  for (const p of data.support) {
    svg.circle(sx(p[0]), sy(p[1]), 4, "#b2182b");
  }
  svg.axes(MARGIN, height - MARGIN, width - MARGIN, MARGIN, xe, ye, "z exponent", "energy exponent");
}

function centroid(points: number[][]): number[] {
  const n = points.length;
  const dim = points[0].length;
  const c = new Array(dim).fill(0);
  for (const p of points) for (let i = 0; i < dim; i++) c[i] += p[i] / n;
  return c;
}

function render3dPolytope(svg: Svg, data: PolytopeData, width: number, height: number): void {
  const view = [1.0, 0.55, 0.4]; // direction the facets face toward the camera
  const iso = (p: number[]): [number, number, number] => [
    (p[0] - p[1]) * Math.cos(Math.PI / 6),
    (p[0] + p[1]) * Math.sin(Math.PI / 6) - p[2] * 0.9,
    p[0] * view[0] + p[1] * view[1] + p[2] * view[2],
  ];
  const projectedAll = data.support.map(iso);
  const xe = extentOf(projectedAll.map((p) => p[0]));
  const ye = extentOf(projectedAll.map((p) => p[1]));
  const sx = scale({ min: xe.min - 0.4, max: xe.max + 0.4 }, MARGIN, width - MARGIN);
  const sy = scale({ min: ye.min - 0.4, max: ye.max + 0.4 }, height - MARGIN, MARGIN);

  const faces = data.faces.map((f) => {
    const c = centroid(f.points);
    // order the facet's points by angle in its own plane
    const basis = planeBasis(f.normal);
    const angle = (p: number[]) => {
      const d = p.map((v, i) => v - c[i]);
      return Math.atan2(dot(d, basis[1]), dot(d, basis[0]));
    };
    const ordered = [...f.points].sort((a, b) => angle(a) - angle(b));
    const depth = dot(c, view);
    const nn = norm(f.normal);
    const facing = dot(f.normal, view) / (nn || 1);
    return { ordered, depth, facing, vertical: f.normal[2] === 0 };
  });
  faces.sort((a, b) => a.depth - b.depth);
  for (const f of faces) {
    const shade = 0.35 + 0.4 * Math.max(0, f.facing);
    const base = f.vertical ? "#b2182b" : "#2166ac";
    svg.polygon(
      f.ordered.map((p) => {
        const q = iso(p);
        return [sx(q[0]), sy(q[1])] as [number, number];
      }),
      lighten(base, 1 - shade),
      "#1a1a1a",
      0.8
    );
  }
  for (const p of data.support) {
    const q = iso(p);
    svg.circle(sx(q[0]), sy(q[1]), 2.6, "#00000088");
  }
}

function dot(a: number[], b: number[]): number {
  return a.reduce((s, v, i) => s + v * b[i], 0);
}

function norm(a: number[]): number {
  return Math.sqrt(dot(a, a));
}

function planeBasis(normal: number[]): [number[], number[]] {
  const n = normal;
  const pick = Math.abs(n[0]) < 0.9 * norm(n) ? [1, 0, 0] : [0, 1, 0];
  const u = cross(n, pick);
  const v = cross(n, u);
  return [u, v];
}

function cross(a: number[], b: number[]): number[] {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}
