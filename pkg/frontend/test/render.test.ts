import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { main } from "../src/cli.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const recipesDir = path.join(here, "..", "testdata", "recipes");

let tmp: string;
let errors: string[];
let logSpy: ReturnType<typeof vi.spyOn>;
let errSpy: ReturnType<typeof vi.spyOn>;

beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), "plotkit-"));
  errors = [];
  logSpy = vi.spyOn(console, "log").mockImplementation(() => {});
  errSpy = vi.spyOn(console, "error").mockImplementation((...args: unknown[]) => {
    errors.push(args.map(String).join(" "));
  });
});

afterEach(() => {
  logSpy.mockRestore();
  errSpy.mockRestore();
  fs.rmSync(tmp, { recursive: true, force: true });
});

function renderTwice(recipeName: string): [Buffer, Buffer, string] {
  const recipePath = path.join(recipesDir, recipeName);
  const recipe = JSON.parse(fs.readFileSync(recipePath, "utf8"));
  const outPath = path.join(tmp, "render.svg");
  recipe.output = outPath;
  const tmpRecipe = path.join(recipesDir, `.tmp-${recipeName}`);
  fs.writeFileSync(tmpRecipe, JSON.stringify(recipe));
  try {
    expect(main(["--recipe", tmpRecipe])).toBe(0);
    const first = fs.readFileSync(outPath);
    fs.rmSync(outPath);
    expect(main(["--recipe", tmpRecipe])).toBe(0);
    const second = fs.readFileSync(outPath);
    return [first, second, first.toString("utf8")];
  } finally {
    fs.rmSync(tmpRecipe, { force: true });
  }
}

describe("golden recipes", () => {
  it("renders the rate-lines figure deterministically", () => {
    const [a, b, svg] = renderTwice("rates.json");
    expect(a.equals(b)).toBe(true);
    expect(svg.startsWith("<svg ")).toBe(true);
    // three rate curves
    expect(svg.match(/<polyline/g)?.length).toBe(3);
    expect(svg).toContain("optical depth");
  });

  it("renders the scan-with-fits figure deterministically", () => {
    const [a, b, svg] = renderTwice("odfit.json");
    expect(a.equals(b)).toBe(true);
    // two straight fits, one parabola, one inset fit line
    expect(svg.match(/<polyline/g)?.length).toBe(4);
    expect(svg).toContain("heralding efficiency");
    expect(svg).toContain("slope 1.7");
  });

  it("renders the beat-overlays figure deterministically", () => {
    const [a, b, svg] = renderTwice("beats.json");
    expect(a.equals(b)).toBe(true);
    // two correlation curves plus two spectra in the inset
    expect(svg.match(/<polyline/g)?.length).toBe(4);
    expect(svg).toContain("detuning (GHz)");
    expect(svg).toContain("alpha = 6");
  });
});

function writeRecipe(obj: unknown): string {
  const p = path.join(tmp, "recipe.json");
  fs.writeFileSync(p, JSON.stringify(obj));
  return p;
}

describe("failure modes", () => {
  it("names the missing column and writes nothing", () => {
    fs.writeFileSync(path.join(tmp, "scan.csv"), "od,n_s,n_i\n1,2,3\n");
    const recipe = writeRecipe({
      figure: "fig2", odscan: "scan.csv", output: "broken.svg",
    });
    expect(main(["--recipe", recipe])).toBe(3);
    expect(errors.join("\n")).toContain('missing column "n_c"');
    expect(fs.existsSync(path.join(tmp, "broken.svg"))).toBe(false);
  });

  it("rejects an empty CSV and writes nothing", () => {
    fs.writeFileSync(path.join(tmp, "scan.csv"), "");
    const recipe = writeRecipe({
      figure: "fig2", odscan: "scan.csv", output: "broken.svg",
    });
    expect(main(["--recipe", recipe])).toBe(3);
    expect(fs.existsSync(path.join(tmp, "broken.svg"))).toBe(false);
  });

  it("rejects a header-only CSV", () => {
    fs.writeFileSync(path.join(tmp, "scan.csv"), "od,n_s,n_i,n_c\n");
    const recipe = writeRecipe({
      figure: "fig2", odscan: "scan.csv", output: "broken.svg",
    });
    expect(main(["--recipe", recipe])).toBe(3);
    expect(errors.join("\n")).toContain("no data rows");
    expect(fs.existsSync(path.join(tmp, "broken.svg"))).toBe(false);
  });

  it("names a non-numeric cell", () => {
    fs.writeFileSync(path.join(tmp, "scan.csv"), "od,n_s,n_i,n_c\n1,2,3,banana\n");
    const recipe = writeRecipe({
      figure: "fig2", odscan: "scan.csv", output: "broken.svg",
    });
    expect(main(["--recipe", recipe])).toBe(3);
    expect(errors.join("\n")).toContain('column "n_c"');
  });

  it("names a missing fit row", () => {
    const golden = path.join(recipesDir, "..", "odscan");
    fs.copyFileSync(path.join(golden, "odscan.csv"), path.join(tmp, "odscan.csv"));
    fs.writeFileSync(path.join(tmp, "fits.csv"), "name,value\nns_linear_coeff,9000\n");
    const recipe = writeRecipe({
      figure: "fig3", odscan: "odscan.csv", fits: "fits.csv", output: "broken.svg",
    });
    expect(main(["--recipe", recipe])).toBe(3);
    expect(errors.join("\n")).toContain('missing row "ni_linear_coeff"');
    expect(fs.existsSync(path.join(tmp, "broken.svg"))).toBe(false);
  });

  it("rejects an unknown figure id", () => {
    const recipe = writeRecipe({ figure: "fig9", odscan: "x.csv", output: "y.svg" });
    expect(main(["--recipe", recipe])).toBe(2);
    expect(errors.join("\n")).toContain("figure");
  });

  it("rejects a recipe with a missing field", () => {
    const recipe = writeRecipe({ figure: "fig3", odscan: "x.csv", output: "y.svg" });
    expect(main(["--recipe", recipe])).toBe(2);
    expect(errors.join("\n")).toContain("fits");
  });

  it("requires --recipe", () => {
    expect(main([])).toBe(2);
  });

  it("reports an unreadable recipe path", () => {
    expect(main(["--recipe", path.join(tmp, "nope.json")])).toBe(2);
    expect(errors.join("\n")).toContain("cannot read recipe");
  });
});
