import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  loadBands,
  loadDos,
  loadFermi,
  loadPolytope,
  recomputeDigest,
  SchemaError,
} from "../src/schema.js";
import {
  renderBloch,
  renderDos,
  renderFermi,
  renderPolytope,
} from "../src/render.js";
import { main } from "../src/cli.js";

const FIX = join(__dirname, "..", "fixtures");

const fixture = (...parts: string[]) => join(FIX, ...parts);

describe("loaders", () => {
  it("parses a 2-D bands.csv into a full tensor grid", () => {
    const data = loadBands(fixture("graphene_bands", "bands.csv"));
    expect(data.dim).toBe(2);
    expect(data.nBands).toBe(2);
    expect(data.rows.length).toBe(64 * 64);
  });

  it("parses dos.csv", () => {
    const data = loadDos(fixture("line_dos", "dos.csv"));
    expect(data.centers.length).toBe(64);
    expect(Math.min(...data.densities)).toBeGreaterThanOrEqual(0);
  });

  it("parses fermi.json curves and points", () => {
    const curves = loadFermi(fixture("hex_fermi", "fermi.json"));
    expect(curves.curves.length).toBeGreaterThan(0);
    const points = loadFermi(fixture("graphene_fermi", "fermi.json"));
    expect(points.points.length).toBe(2);
    expect(points.curves.length).toBe(0);
  });

  it("parses polytope.json", () => {
    const data = loadPolytope(fixture("square_polytope", "polytope.json"));
    expect(data.normalizedVolume).toBe(4);
    expect(data.faces.length).toBe(5);
  });

  it("rejects files of the wrong schema", () => {
    expect(() => loadBands(fixture("line_dos", "dos.csv"))).toThrow(SchemaError);
    expect(() => loadFermi(fixture("square_polytope", "polytope.json"))).toThrow(
      SchemaError
    );
    expect(() => loadPolytope(fixture("graphene_fermi", "fermi.json"))).toThrow(
      SchemaError
    );
  });
});

describe("renderers ingest every fixture emission", () => {
  const cases: [string, () => string][] = [
    ["graphene bands surface", () => renderBloch(loadBands(fixture("graphene_bands", "bands.csv")))],
    ["line bands curve", () => renderBloch(loadBands(fixture("line_bands", "bands.csv")))],
    ["line dos", () => renderDos(loadDos(fixture("line_dos", "dos.csv")))],
    ["lieb dos", () => renderDos(loadDos(fixture("lieb_dos", "dos.csv")))],
    ["hex fermi curves", () => renderFermi(loadFermi(fixture("hex_fermi", "fermi.json")))],
    ["graphene fermi points", () => renderFermi(loadFermi(fixture("graphene_fermi", "fermi.json")))],
    ["empty fermi", () => renderFermi(loadFermi(fixture("empty_fermi", "fermi.json")))],
    ["square polytope", () => renderPolytope(loadPolytope(fixture("square_polytope", "polytope.json")))],
    ["lieb polytope", () => renderPolytope(loadPolytope(fixture("lieb_polytope", "polytope.json")))],
    ["line polytope", () => renderPolytope(loadPolytope(fixture("line_polytope", "polytope.json")))],
  ];
  for (const [name, run] of cases) {
    it(`renders ${name}`, () => {
      const svg = run();
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      expect(svg.length).toBeGreaterThan(300);
    });
  }
});

describe("pure presentation", () => {
  it("digest of loaded arrays is unchanged by rendering", () => {
    const bands = loadBands(fixture("graphene_bands", "bands.csv"));
    renderBloch(bands);
    expect(recomputeDigest(bands)).toBe(bands.digest);

    const dos = loadDos(fixture("line_dos", "dos.csv"));
    renderDos(dos);
    expect(recomputeDigest(dos)).toBe(dos.digest);

    const fermi = loadFermi(fixture("hex_fermi", "fermi.json"));
    renderFermi(fermi);
    expect(recomputeDigest(fermi)).toBe(fermi.digest);

    const poly = loadPolytope(fixture("lieb_polytope", "polytope.json"));
    renderPolytope(poly);
    expect(recomputeDigest(poly)).toBe(poly.digest);
  });

  it("digest equals a digest recomputed from the source file", () => {
    const a = loadFermi(fixture("graphene_fermi", "fermi.json"));
    const b = loadFermi(fixture("graphene_fermi", "fermi.json"));
    expect(a.digest).toBe(b.digest);
  });
});

describe("renderer content", () => {
  it("graphene fermi shows the two conical points", () => {
    const svg = renderFermi(loadFermi(fixture("graphene_fermi", "fermi.json")));
    const circles = svg.match(/<circle/g) ?? [];
    expect(circles.length).toBe(2);
    expect(svg).not.toContain("empty section");
  });

  it("empty fermi annotates the blank axes", () => {
    const svg = renderFermi(loadFermi(fixture("empty_fermi", "fermi.json")));
    expect(svg).toContain("empty section");
  });

  it("dos renders one bar per bin", () => {
    const svg = renderDos(loadDos(fixture("line_dos", "dos.csv")));
    const bars = svg.match(/<rect/g) ?? [];
    expect(bars.length).toBe(64 + 2); // bins + background + frame
  });

  it("lieb polytope draws all facets with two tints", () => {
    const data = loadPolytope(fixture("lieb_polytope", "polytope.json"));
    const svg = renderPolytope(data);
    const polys = svg.match(/<polygon/g) ?? [];
    expect(polys.length).toBe(data.faces.length);
    // vertical facets are tinted from red, the others from blue
    const fills = new Set(
      [...svg.matchAll(/<polygon[^>]*fill="(rgb[^"]+)"/g)].map((m) => m[1])
    );
    expect(fills.size).toBeGreaterThanOrEqual(2);
  });

  it("band surface renders a quad mesh", () => {
    const svg = renderBloch(loadBands(fixture("graphene_bands", "bands.csv")));
    const quads = svg.match(/<polygon/g) ?? [];
    expect(quads.length).toBeGreaterThan(1000);
  });
});

describe("cli", () => {
  it("renders every kind end to end and verifies the digest", () => {
    const dir = mkdtempSync(join(tmpdir(), "blochlab-render-"));
    const jobs: [string, string][] = [
      ["bloch", fixture("graphene_bands", "bands.csv")],
      ["fermi", fixture("hex_fermi", "fermi.json")],
      ["dos", fixture("line_dos", "dos.csv")],
      ["polytope", fixture("square_polytope", "polytope.json")],
    ];
    for (const [kind, input] of jobs) {
      const out = join(dir, `${kind}.svg`);
      expect(main([kind, input, "-o", out])).toBe(0);
      const svg = readFileSync(out, "utf8");
      expect(svg).toContain("</svg>");
    }
  });

  it("fails with exit 2 on a schema mismatch", () => {
    expect(main(["fermi", fixture("line_dos", "dos.csv"), "-o", "/dev/null"])).toBe(2);
  });

  it("fails with exit 2 on a missing file", () => {
    expect(main(["dos", fixture("nope", "missing.csv"), "-o", "/dev/null"])).toBe(2);
  });

  it("honours the fermi window override", () => {
    const dir = mkdtempSync(join(tmpdir(), "blochlab-render-"));
    const out = join(dir, "fermi.svg");
    expect(
      main(["fermi", fixture("hex_fermi", "fermi.json"), "-o", out, "--window", "0"])
    ).toBe(0);
  });
});
