// Small deterministic SVG helpers. No clock, no randomness, fixed
// formatting everywhere, so identical inputs give identical bytes.

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Scale {
  map: (v: number) => number;
  lo: number;
  hi: number;
  log: boolean;
}

export function linearScale(lo: number, hi: number, r0: number, r1: number): Scale {
  const span = hi - lo || 1;
  return { map: (v) => r0 + ((v - lo) / span) * (r1 - r0), lo, hi, log: false };
}

export function logScale(lo: number, hi: number, r0: number, r1: number): Scale {
  const a = Math.log10(lo);
  const span = Math.log10(hi) - a || 1;
  return { map: (v) => r0 + ((Math.log10(v) - a) / span) * (r1 - r0), lo, hi, log: true };
}

/** Geometry coordinate, fixed two decimals. */
export function coord(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Compact tick label. */
export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) {
    return v.toExponential(1).replace(/\.0e/, "e").replace(/e\+?(-?)0*(\d)/, "e$1$2");
  }
  const s = v.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
  return s;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function text(x: number, y: number, s: string, opts: {
  size?: number;
  anchor?: "start" | "middle" | "end";
  rotate?: boolean;
  fill?: string;
} = {}): string {
  const size = opts.size ?? 12;
  const anchor = opts.anchor ?? "start";
  const fill = opts.fill ?? "#000";
  const tr = opts.rotate ? ` transform="rotate(-90 ${coord(x)} ${coord(y)})"` : "";
  return `<text x="${coord(x)}" y="${coord(y)}" font-size="${size}" ` +
    `text-anchor="${anchor}" fill="${fill}" font-family="sans-serif"${tr}>${esc(s)}</text>`;
}

export function line(x1: number, y1: number, x2: number, y2: number,
                     stroke: string, width = 1): string {
  return `<line x1="${coord(x1)}" y1="${coord(y1)}" x2="${coord(x2)}" y2="${coord(y2)}" ` +
    `stroke="${stroke}" stroke-width="${width}"/>`;
}

export function polyline(pts: Array<[number, number]>, stroke: string,
                         width = 1.5, dash?: string): string {
  const d = dash ? ` stroke-dasharray="${dash}"` : "";
  const coords = pts.map(([x, y]) => `${coord(x)},${coord(y)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${d} points="${coords}"/>`;
}

export function circles(pts: Array<[number, number]>, r: number, fill: string): string {
  return pts
    .map(([x, y]) => `<circle cx="${coord(x)}" cy="${coord(y)}" r="${r}" fill="${fill}"/>`)
    .join("");
}

export function rect(b: Box, fill: string, stroke = "none"): string {
  return `<rect x="${coord(b.x)}" y="${coord(b.y)}" width="${coord(b.w)}" ` +
    `height="${coord(b.h)}" fill="${fill}" stroke="${stroke}"/>`;
}

/** Evenly spaced round-number ticks covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return out;
}

/** Powers of ten inside [lo, hi] for log axes. */
export function decadeTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  return out;
}

/**
 * Axis frame with ticks and labels. Returns SVG fragments; the caller
 * draws data clipped to the frame separately.
 */
export function axes(frame: Box, xs: Scale, ys: Scale, xLabel: string, yLabel: string,
                     opts: { size?: number; xTicks?: number[]; yTicks?: number[] } = {}): string {
  const size = opts.size ?? 12;
  const xTicks = opts.xTicks ?? (xs.log ? decadeTicks(xs.lo, xs.hi) : niceTicks(xs.lo, xs.hi));
  const yTicks = opts.yTicks ?? (ys.log ? decadeTicks(ys.lo, ys.hi) : niceTicks(ys.lo, ys.hi));
  const parts: string[] = [];
  parts.push(rect(frame, "none", "#000"));
  for (const t of xTicks) {
    const x = xs.map(t);
    parts.push(line(x, frame.y + frame.h, x, frame.y + frame.h - 5, "#000"));
    parts.push(text(x, frame.y + frame.h + size + 4, fmt(t), { size, anchor: "middle" }));
  }
  for (const t of yTicks) {
    const y = ys.map(t);
    parts.push(line(frame.x, y, frame.x + 5, y, "#000"));
    parts.push(text(frame.x - 6, y + size / 3, fmt(t), { size, anchor: "end" }));
  }
  parts.push(text(frame.x + frame.w / 2, frame.y + frame.h + 2.4 * size + 6, xLabel,
                  { size, anchor: "middle" }));
  parts.push(text(frame.x - 4.2 * size, frame.y + frame.h / 2, yLabel,
                  { size, anchor: "middle", rotate: true }));
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#fff"/>\n` +
    body +
    `\n</svg>\n`;
}
