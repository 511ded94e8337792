#!/usr/bin/env node
/**
 * blochlab-render <kind> <input> -o <image.svg> [--window START] [--width N] [--height N]
 *
 * kinds: bloch (bands.csv), fermi (fermi.json), dos (dos.csv),
 *        polytope (polytope.json).
 *
 * After rendering, the loaded arrays are re-digested and compared with
 * the load-time digest; a mismatch aborts (the renderer must not alter
 * data).  Exit codes: 0 ok, 2 schema/render failure, 64 usage.
 */

import { writeFileSync } from "node:fs";
import process from "node:process";

import {
  Emission,
  SchemaError,
  loadBands,
  loadDos,
  loadFermi,
  loadPolytope,
  recomputeDigest,
} from "./schema.js";
import {
  RenderOptions,
  renderBloch,
  renderDos,
  renderFermi,
  renderPolytope,
} from "./render.js";

const KINDS = ["bloch", "fermi", "dos", "polytope"] as const;
type Kind = (typeof KINDS)[number];

function usage(): never {
  process.stderr.write(
    "usage: blochlab-render <bloch|fermi|dos|polytope> <input> -o <out.svg> " +
      "[--window START] [--width N] [--height N]\n"
  );
  process.exit(64);
}

export function main(argv: string[]): number {
  const args = [...argv];
  if (args.length < 2) usage();
  const kind = args.shift() as Kind;
  if (!KINDS.includes(kind)) usage();
  const input = args.shift()!;
  let out: string | null = null;
  const opts: RenderOptions = {};
  while (args.length) {
    const a = args.shift()!;
    if (a === "-o" || a === "--out") out = args.shift() ?? null;
    else if (a === "--window") opts.windowStart = Number(args.shift());
    else if (a === "--width") opts.width = Number(args.shift());
    else if (a === "--height") opts.height = Number(args.shift());
    else usage();
  }
  if (!out) usage();

  try {
    let data: Emission;
    let svg: string;
    switch (kind) {
      case "bloch":
        data = loadBands(input);
        svg = renderBloch(data, opts);
        break;
      case "fermi":
        data = loadFermi(input);
        svg = renderFermi(data, opts);
        break;
      case "dos":
        data = loadDos(input);
        svg = renderDos(data, opts);
        break;
      case "polytope":
        data = loadPolytope(input);
        svg = renderPolytope(data, opts);
        break;
    }
    const after = recomputeDigest(data);
    if (after !== data.digest) {
      process.stderr.write("render error: data digest changed during rendering\n");
      return 2;
    }
    writeFileSync(out, svg);
    process.stdout.write(`${out} written (digest ${data.digest.slice(0, 16)}..., verified)\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof SyntaxError) {
      process.stderr.write(`schema error: ${(err as Error).message}\n`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      process.stderr.write(`I/O error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
