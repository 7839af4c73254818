import path from "node:path";
import { readTable, readFits, fitValue, SchemaError } from "./csv.js";
import type { Recipe, RatesRecipe, OdFitRecipe, BeatsRecipe } from "./schema.js";
import {
  Box, Scale, linearScale, logScale, axes, polyline, circles, line, rect,
  text, document as svgDocument,
} from "./svg.js";

const WIDTH = 720;
const HEIGHT = 480;
const MAIN: Box = { x: 72, y: 48, w: WIDTH - 72 - 24, h: HEIGHT - 48 - 64 };

const BLACK = "#000000";
const RED = "#c1121f";
const BLUE = "#1f5fbf";
const PALETTE = [BLACK, RED, BLUE, "#2a9d3a", "#7a3fbf"];

function legend(x: number, y: number, entries: Array<{ label: string; color: string }>): string {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const yy = y + 18 * i;
    parts.push(line(x, yy - 4, x + 22, yy - 4, e.color, 2));
    parts.push(text(x + 28, yy, e.label, { size: 12 }));
  });
  return parts.join("\n");
}

function title(t: string): string {
  return text(WIDTH / 2, 24, t, { size: 15, anchor: "middle" });
}

function toPoints(xv: number[], yv: number[], xs: Scale, ys: Scale): Array<[number, number]> {
  return xv.map((x, i) => [xs.map(x), ys.map(yv[i])] as [number, number]);
}

// three count-rate lines against optical depth on shared linear axes
export function renderRates(recipe: RatesRecipe, resolve: (p: string) => string): string {
  const t = readTable(resolve(recipe.odscan), ["od", "n_s", "n_i", "n_c"]);
  const od = t.data.get("od")!;
  const ns = t.data.get("n_s")!;
  const ni = t.data.get("n_i")!;
  const nc = t.data.get("n_c")!;
  const xs = linearScale(0, Math.max(...od) * 1.05, MAIN.x, MAIN.x + MAIN.w);
  const yMax = Math.max(...ns, ...ni, ...nc) * 1.05;
  const ys = linearScale(0, yMax, MAIN.y + MAIN.h, MAIN.y);
  const body = [
    title(recipe.title),
    axes(MAIN, xs, ys, "optical depth", "counts per second"),
    polyline(toPoints(od, ns, xs, ys), BLACK),
    polyline(toPoints(od, ni, xs, ys), RED),
    polyline(toPoints(od, nc, xs, ys), BLUE),
    legend(MAIN.x + 16, MAIN.y + 20, [
      { label: "signal singles", color: BLACK },
      { label: "idler singles", color: RED },
      { label: "coincidences", color: BLUE },
    ]),
  ];
  return svgDocument(WIDTH, HEIGHT, body.join("\n"));
}

// scan points with straight-line fits through the singles, a parabola
// through the coincidences, and a log-log heralding-efficiency inset
export function renderOdFit(recipe: OdFitRecipe, resolve: (p: string) => string): string {
  const scanFile = resolve(recipe.odscan);
  const fitFile = resolve(recipe.fits);
  const t = readTable(scanFile, ["od", "n_s", "n_i", "n_c"]);
  const fits = readFits(fitFile);
  const od = t.data.get("od")!;
  const ns = t.data.get("n_s")!;
  const ni = t.data.get("n_i")!;
  const nc = t.data.get("n_c")!;

  const odMax = Math.max(...od);
  const xs = linearScale(0, odMax * 1.05, MAIN.x, MAIN.x + MAIN.w);
  const yMax = Math.max(...ns, ...ni) * 1.08;
  const ys = linearScale(0, yMax, MAIN.y + MAIN.h, MAIN.y);

  const cs = fitValue(fits, "ns_linear_coeff", fitFile);
  const ci = fitValue(fits, "ni_linear_coeff", fitFile);
  const cq = fitValue(fits, "nc_quadratic_coeff", fitFile);
  const slope = fitValue(fits, "powerlaw_eta_exponent", fitFile);
  const pref = fitValue(fits, "powerlaw_eta_prefactor", fitFile);

  const grid: number[] = [];
  for (let i = 0; i <= 128; i++) grid.push((odMax * 1.05 * i) / 128);

  // log-log inset of eta = n_c / n_s with the fitted power law
  const inset: Box = {
    x: MAIN.x + 0.08 * MAIN.w,
    y: MAIN.y + 0.06 * MAIN.h,
    w: 0.34 * MAIN.w,
    h: 0.40 * MAIN.h,
  };
  const eta = nc.map((v, i) => v / ns[i]);
  const odMin = Math.min(...od);
  const ixs = logScale(odMin / 1.2, odMax * 1.2, inset.x, inset.x + inset.w);
  const etaLo = Math.min(...eta) / 1.5;
  const etaHi = Math.max(...eta) * 1.5;
  const iys = logScale(etaLo, etaHi, inset.y + inset.h, inset.y);
  const fitPts: Array<[number, number]> = [odMin, odMax].map((x) => [
    ixs.map(x),
    iys.map(pref * Math.pow(x, slope)),
  ]);

  const body = [
    title(recipe.title),
    axes(MAIN, xs, ys, "optical depth", "counts per second"),
    polyline(toPoints(grid, grid.map((x) => cs * x), xs, ys), BLACK),
    polyline(toPoints(grid, grid.map((x) => ci * x), xs, ys), RED),
    polyline(toPoints(grid, grid.map((x) => cq * x * x), xs, ys), BLUE),
    circles(toPoints(od, ns, xs, ys), 3, BLACK),
    circles(toPoints(od, ni, xs, ys), 3, RED),
    circles(toPoints(od, nc, xs, ys), 3, BLUE),
    legend(MAIN.x + 0.52 * MAIN.w, MAIN.y + 0.62 * MAIN.h, [
      { label: "signal (linear fit)", color: BLACK },
      { label: "idler (linear fit)", color: RED },
      { label: "coincidence (parabola fit)", color: BLUE },
    ]),
    rect(inset, "#fff", "#000"),
    axes(inset, ixs, iys, "optical depth", "heralding efficiency", { size: 9 }),
    circles(toPoints(od, eta, ixs, iys), 2, BLACK),
    polyline(fitPts, RED, 1.2),
    text(inset.x + inset.w - 6, inset.y + 14, `slope ${slope.toFixed(2)}`,
         { size: 10, anchor: "end", fill: RED }),
  ];
  return svgDocument(WIDTH, HEIGHT, body.join("\n"));
}

// overlaid detector-plane correlations, one per absorption depth, with
// normalized two-lobed power spectra in an inset
export function renderBeats(recipe: BeatsRecipe, resolve: (p: string) => string): string {
  const tLo = -2;
  const tHi = 10; // ns
  const curves = recipe.curves.map((c, i) => {
    const tb = readTable(resolve(c.path), ["tau_s", "value"]);
    const tau = tb.data.get("tau_s")!.map((v) => v * 1e9);
    const val = tb.data.get("value")!;
    const keep = tau.map((v, j) => j).filter((j) => tau[j] >= tLo && tau[j] <= tHi);
    const peak = Math.max(...keep.map((j) => val[j]));
    if (!(peak > 0)) {
      throw new SchemaError(`${path.basename(resolve(c.path))}: no positive values in window`);
    }
    return {
      label: c.label,
      color: PALETTE[i % PALETTE.length],
      tau: keep.map((j) => tau[j]),
      val: keep.map((j) => val[j] / peak),
    };
  });

  const xs = linearScale(tLo, tHi, MAIN.x, MAIN.x + MAIN.w);
  const ys = linearScale(0, 1.05, MAIN.y + MAIN.h, MAIN.y);

  const inset: Box = {
    x: MAIN.x + 0.58 * MAIN.w,
    y: MAIN.y + 0.10 * MAIN.h,
    w: 0.38 * MAIN.w,
    h: 0.42 * MAIN.h,
  };
  const fLo = -2.5;
  const fHi = 2.5; // GHz
  const spectra = recipe.spectra.map((c, i) => {
    const tb = readTable(resolve(c.path), ["omega_rad_s", "fsq"]);
    const ghz = tb.data.get("omega_rad_s")!.map((w) => w / (2 * Math.PI) / 1e9);
    const p = tb.data.get("fsq")!;
    const keep = ghz.map((v, j) => j).filter((j) => ghz[j] >= fLo && ghz[j] <= fHi);
    const peak = Math.max(...keep.map((j) => p[j]));
    if (!(peak > 0)) {
      throw new SchemaError(`${path.basename(resolve(c.path))}: no positive values in window`);
    }
    return {
      color: PALETTE[i % PALETTE.length],
      x: keep.map((j) => ghz[j]),
      y: keep.map((j) => p[j] / peak),
    };
  });
  const ixs = linearScale(fLo, fHi, inset.x, inset.x + inset.w);
  const iys = linearScale(0, 1.08, inset.y + inset.h, inset.y);

  const body = [
    title(recipe.title),
    axes(MAIN, xs, ys, "signal-idler delay (ns)", "normalized correlation"),
    ...curves.map((c) => polyline(toPoints(c.tau, c.val, xs, ys), c.color)),
    legend(MAIN.x + 16, MAIN.y + 20, curves.map((c) => ({ label: c.label, color: c.color }))),
    rect(inset, "#fff", "#000"),
    axes(inset, ixs, iys, "detuning (GHz)", "filter power", {
      size: 9,
      yTicks: [0, 0.5, 1],
    }),
    ...spectra.map((s) => polyline(toPoints(s.x, s.y, ixs, iys), s.color, 1.2)),
  ];
  return svgDocument(WIDTH, HEIGHT, body.join("\n"));
}

/** Render any recipe; input paths resolve relative to baseDir. */
export function renderRecipe(recipe: Recipe, baseDir: string): string {
  const resolve = (p: string) => path.resolve(baseDir, p);
  switch (recipe.figure) {
    case "fig2":
      return renderRates(recipe, resolve);
    case "fig3":
      return renderOdFit(recipe, resolve);
    case "fig4":
      return renderBeats(recipe, resolve);
  }
}
