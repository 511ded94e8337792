/**
 * Loaders for the blochlab CLI emissions.
 *
 * Each loader parses one documented schema (bands.csv, dos.csv,
 * fermi.json, polytope.json), validates the fields the renderers rely
 * on, and computes a digest over the numeric payload.  Renderers never
 * write through these structures; `digestOf` run again after rendering
 * must reproduce the load-time digest (pure-presentation invariant).
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface BandsData {
  kind: "bands";
  dim: number;
  nBands: number;
  /** row-major sample list: [k..., lambda...] per row */
  rows: number[][];
  digest: string;
}

export interface DosData {
  kind: "dos";
  centers: number[];
  densities: number[];
  digest: string;
}

export interface FermiData {
  kind: "fermi";
  lambda0: [number, number];
  curves: number[][][];
  points: number[][];
  curveKind: string;
  digest: string;
}

export interface PolytopeData {
  kind: "polytope";
  support: number[][];
  hullVertices: number[][];
  faces: { normal: number[]; offset: number; points: number[][] }[];
  normalizedVolume: number;
  degenerate: boolean;
  digest: string;
}

export type Emission = BandsData | DosData | FermiData | PolytopeData;

/** Digest of the numeric payload only (not formatting, not metadata). */
export function digestOf(payload: unknown): string {
  const hash = createHash("sha256");
  hash.update(JSON.stringify(payload));
  return hash.digest("hex");
}

function numeric(value: unknown, context: string): number {
  const n = Number(value);
  if (!Number.isFinite(n)) {
    throw new SchemaError(`${context}: expected a finite number, got ${value}`);
  }
  return n;
}

export function loadBands(path: string): BandsData {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length < 2) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const header = lines[0].split(",");
  const dim = header.filter((h) => h.startsWith("k")).length;
  const nBands = header.filter((h) => h.startsWith("lambda")).length;
  if (dim < 1 || nBands < 1 || dim + nBands !== header.length) {
    throw new SchemaError(`${path}: malformed bands.csv header: ${lines[0]}`);
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`${path}: row ${i + 1} has ${cells.length} columns`);
    }
    return cells.map((c) => numeric(c, `${path}:${i + 1}`));
  });
  return { kind: "bands", dim, nBands, rows, digest: digestOf(rows) };
}

export function loadDos(path: string): DosData {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines[0] !== "center,density") {
    throw new SchemaError(`${path}: missing center,density header`);
  }
  const centers: number[] = [];
  const densities: number[] = [];
  for (const [i, line] of lines.slice(1).entries()) {
    const cells = line.split(",");
    if (cells.length !== 2) {
      throw new SchemaError(`${path}: row ${i + 1} is not center,density`);
    }
    centers.push(numeric(cells[0], path));
    densities.push(numeric(cells[1], path));
  }
  return { kind: "dos", centers, densities, digest: digestOf([centers, densities]) };
}

export function loadFermi(path: string): FermiData {
  const doc = JSON.parse(readFileSync(path, "utf8"));
  if (!("lambda0" in doc) || !("curves" in doc) || !("points" in doc)) {
    throw new SchemaError(`${path}: not a fermi.json emission`);
  }
  const lambda0: [number, number] = [
    numeric(doc.lambda0[0], path),
    numeric(doc.lambda0[1], path),
  ];
  const curves = (doc.curves as unknown[][]).map((c) =>
    (c as unknown[]).map((v) => (v as unknown[]).map((x) => numeric(x, path)))
  );
  const points = (doc.points as unknown[]).map((p) =>
    (p as unknown[]).map((x) => numeric(x, path))
  );
  return {
    kind: "fermi",
    lambda0,
    curves,
    points,
    curveKind: String(doc.curve_kind ?? "sign-change"),
    digest: digestOf([lambda0, curves, points]),
  };
}

export function loadPolytope(path: string): PolytopeData {
  const doc = JSON.parse(readFileSync(path, "utf8"));
  if (!("support" in doc) || !("normalized_volume" in doc)) {
    throw new SchemaError(`${path}: not a polytope.json emission`);
  }
  const support = (doc.support as unknown[]).map((p) =>
    (p as unknown[]).map((x) => numeric(x, path))
  );
  const hullVertices = ((doc.hull_vertices ?? []) as unknown[]).map((p) =>
    (p as unknown[]).map((x) => numeric(x, path))
  );
  const faces = ((doc.faces ?? []) as any[]).map((f) => ({
    normal: (f.normal as unknown[]).map((x) => numeric(x, path)),
    offset: numeric(f.offset, path),
    points: (f.points as unknown[]).map((p) =>
      (p as unknown[]).map((x) => numeric(x, path))
    ),
  }));
  return {
    kind: "polytope",
    support,
    hullVertices,
    faces,
    normalizedVolume: numeric(doc.normalized_volume, path),
    degenerate: Boolean(doc.degenerate),
    digest: digestOf([support, hullVertices, faces.map((f) => [f.normal, f.offset, f.points])]),
  };
}

/** Recompute the digest of an already-loaded emission. */
export function recomputeDigest(data: Emission): string {
  switch (data.kind) {
    case "bands":
      return digestOf(data.rows);
    case "dos":
      return digestOf([data.centers, data.densities]);
    case "fermi":
      return digestOf([data.lambda0, data.curves, data.points]);
    case "polytope":
      return digestOf([
        data.support,
        data.hullVertices,
        data.faces.map((f) => [f.normal, f.offset, f.points]),
      ]);
  }
}
