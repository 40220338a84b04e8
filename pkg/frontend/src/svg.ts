/** Minimal dependency-free SVG assembly: scales, axes, shapes. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 28, right: 16, bottom: 40, left: 52 };

export type Scale = (v: number) => number;

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

/** Round tick positions covering the domain (1-2-5 ladder). */
export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const rawStep = span / Math.max(count - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(rawStep));
  const norm = rawStep / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return parseFloat(v.toPrecision(4)).toString();
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function attrStr(attrs: Record<string, string | number>): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmtCoord(v) : esc(v)}"`)
    .join("");
}

const fmtCoord = (v: number) => parseFloat(v.toFixed(2)).toString();

export class SvgCanvas {
  private parts: string[] = [];

  constructor(
    public readonly width: number,
    public readonly height: number,
  ) {
    this.parts.push(
      `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Record<string, string | number> = {}): void {
    this.parts.push(
      `<line x1="${fmtCoord(x1)}" y1="${fmtCoord(y1)}" x2="${fmtCoord(x2)}" y2="${fmtCoord(y2)}"${attrStr(attrs)}/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, attrs: Record<string, string | number> = {}): void {
    this.parts.push(
      `<rect x="${fmtCoord(x)}" y="${fmtCoord(y)}" width="${fmtCoord(Math.max(w, 0))}" height="${fmtCoord(Math.max(h, 0))}"${attrStr(attrs)}/>`,
    );
  }

  polyline(points: Array<[number, number]>, attrs: Record<string, string | number> = {}): void {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${fmtCoord(x)},${fmtCoord(y)}`).join(" ");
    this.parts.push(`<polyline points="${pts}" fill="none"${attrStr(attrs)}/>`);
  }

  text(x: number, y: number, content: string, attrs: Record<string, string | number> = {}): void {
    this.parts.push(
      `<text x="${fmtCoord(x)}" y="${fmtCoord(y)}" font-family="sans-serif"${attrStr(attrs)}>${esc(content)}</text>`,
    );
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export interface Frame {
  x: Scale;
  y: Scale;
  plot: { x0: number; x1: number; y0: number; y1: number };
}

/** Draw axes with ticks/labels inside `box` and return the data-to-pixel frame. */
export function drawFrame(
  svg: SvgCanvas,
  box: { x: number; y: number; width: number; height: number },
  xDomain: [number, number],
  yDomain: [number, number],
  opts: { title?: string; xLabel?: string; yLabel?: string; margin?: Margin } = {},
): Frame {
  const m = opts.margin ?? DEFAULT_MARGIN;
  const x0 = box.x + m.left;
  const x1 = box.x + box.width - m.right;
  const y0 = box.y + box.height - m.bottom;
  const y1 = box.y + m.top;
  const x = linearScale(xDomain, [x0, x1]);
  const y = linearScale(yDomain, [y0, y1]);

  svg.line(x0, y0, x1, y0, { stroke: "black", "stroke-width": 1 });
  svg.line(x0, y0, x0, y1, { stroke: "black", "stroke-width": 1 });
  for (const t of ticks(xDomain)) {
    const px = x(t);
    svg.line(px, y0, px, y0 + 4, { stroke: "black", "stroke-width": 1 });
    svg.text(px, y0 + 16, fmt(t), { "font-size": 10, "text-anchor": "middle" });
  }
  for (const t of ticks(yDomain)) {
    const py = y(t);
    svg.line(x0 - 4, py, x0, py, { stroke: "black", "stroke-width": 1 });
    svg.text(x0 - 6, py + 3, fmt(t), { "font-size": 10, "text-anchor": "end" });
  }
  if (opts.title) {
    svg.text((x0 + x1) / 2, box.y + 16, opts.title, {
      "font-size": 12,
      "text-anchor": "middle",
      "font-weight": "bold",
    });
  }
  if (opts.xLabel) {
    svg.text((x0 + x1) / 2, y0 + 32, opts.xLabel, {
      "font-size": 11,
      "text-anchor": "middle",
    });
  }
  if (opts.yLabel) {
    const cx = box.x + 12;
    const cy = (y0 + y1) / 2;
    svg.raw(
      `<text x="${cx}" y="${cy}" font-family="sans-serif" font-size="11" text-anchor="middle" ` +
        `transform="rotate(-90 ${cx} ${cy})">${esc(opts.yLabel)}</text>`,
    );
  }
  return { x, y, plot: { x0, x1, y0, y1 } };
}

/** Split an optionally-null series into contiguous drawable segments. */
export function segments(
  xs: number[],
  ys: Array<number | null>,
  keep?: boolean[],
): Array<Array<[number, number]>> {
  const out: Array<Array<[number, number]>> = [];
  let cur: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    const v = ys[i];
    if (v === null || v === undefined || !isFinite(v) || (keep && !keep[i])) {
      if (cur.length > 1) out.push(cur);
      cur = [];
    } else {
      cur.push([xs[i], v]);
    }
  }
  if (cur.length > 1) out.push(cur);
  return out;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

export function padded([lo, hi]: [number, number], frac = 0.05): [number, number] {
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}
