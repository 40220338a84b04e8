import type { EnvelopeBundle, Histogram, Overlay, PsiCurve } from "./schemas.js";
import {
  SvgCanvas,
  drawFrame,
  extent,
  padded,
  segments,
} from "./svg.js";

// Color conventions shared by every figure: theoretical curves black,
// simulated envelopes blue, observed data red.
export const COLOR_THEORY = "black";
export const COLOR_ENVELOPE = "blue";
export const COLOR_DATA = "red";

const PANEL_W = 480;
const PANEL_H = 360;

/** Eigenvalue histogram with an optional theoretical density overlay. */
export function renderEsdMp(data: Histogram): string {
  const svg = new SvgCanvas(PANEL_W, PANEL_H);
  const edges = data.bin_edges;
  const total = Math.max(data.total, 1);
  const density = data.counts.map(
    (c, i) => c / total / Math.max(edges[i + 1] - edges[i], 1e-300),
  );
  const xDom = padded([edges[0], edges[edges.length - 1]], 0.02);
  const yMax = Math.max(...density, ...(data.mp_overlay?.density ?? [0]));
  const title = data.gene_id
    ? `Eigenvalue distribution — ${data.gene_id}`
    : "Eigenvalue distribution";
  const f = drawFrame(
    svg,
    { x: 0, y: 0, width: PANEL_W, height: PANEL_H },
    xDom,
    [0, yMax * 1.05 || 1],
    { title, xLabel: "eigenvalue", yLabel: "density" },
  );
  for (let i = 0; i < data.counts.length; i++) {
    const x = f.x(edges[i]);
    const w = f.x(edges[i + 1]) - x;
    const y = f.y(density[i]);
    svg.rect(x, y, w, f.plot.y0 - y, {
      fill: COLOR_DATA,
      "fill-opacity": 0.35,
      stroke: COLOR_DATA,
      "stroke-width": 0.5,
    });
  }
  if (data.mp_overlay) {
    const pts = data.mp_overlay.x.map(
      (x, i) => [f.x(x), f.y(data.mp_overlay!.density[i])] as [number, number],
    );
    svg.polyline(pts, { stroke: COLOR_THEORY, "stroke-width": 1.8 });
  }
  return svg.toString();
}

/** Theoretical psi curve over the admissible alpha grid. */
export function renderPsiCurve(data: PsiCurve): string {
  const svg = new SvgCanvas(PANEL_W, PANEL_H);
  const finiteVals = data.psi_values.filter((v): v is number => v !== null);
  const xDom = padded(extent(data.alpha_grid), 0.02);
  const yDom = padded(extent(finiteVals));
  const f = drawFrame(
    svg,
    { x: 0, y: 0, width: PANEL_W, height: PANEL_H },
    xDom,
    yDom,
    { title: "psi curve", xLabel: "alpha", yLabel: "psi(alpha)" },
  );
  if (data.support) {
    const px = f.x(data.support.upper_edge);
    if (px >= f.plot.x0 && px <= f.plot.x1) {
      svg.line(px, f.plot.y0, px, f.plot.y1, {
        stroke: COLOR_THEORY,
        "stroke-width": 1,
        "stroke-dasharray": "4 3",
      });
      svg.text(px + 4, f.plot.y1 + 12, "support edge", { "font-size": 9 });
    }
  }
  for (const seg of segments(data.alpha_grid, data.psi_values, data.admissible)) {
    svg.polyline(
      seg.map(([x, y]) => [f.x(x), f.y(y)] as [number, number]),
      { stroke: COLOR_THEORY, "stroke-width": 1.8 },
    );
  }
  return svg.toString();
}

function envelopePanel(
  svg: SvgCanvas,
  box: { x: number; y: number; width: number; height: number },
  data: EnvelopeBundle,
): void {
  const vals: number[] = [...data.theoretical_psi];
  for (const row of data.envelopes)
    for (const v of row) if (v !== null) vals.push(v);
  for (const v of data.data_psi) if (v !== null) vals.push(v);
  const xDom = padded(extent(data.alpha_grid), 0.02);
  const yDom = padded(extent(vals));
  const title = `envelope (Q=${data.Q}, coverage ${(100 * data.coverage_fraction).toFixed(0)}%)`;
  const f = drawFrame(svg, box, xDom, yDom, {
    title,
    xLabel: "alpha",
    yLabel: "psi(alpha)",
  });
  for (const row of data.envelopes) {
    for (const seg of segments(data.alpha_grid, row)) {
      svg.polyline(
        seg.map(([x, y]) => [f.x(x), f.y(y)] as [number, number]),
        { stroke: COLOR_ENVELOPE, "stroke-width": 0.6, "stroke-opacity": 0.4 },
      );
    }
  }
  const theo = data.alpha_grid.map(
    (x, i) => [f.x(x), f.y(data.theoretical_psi[i])] as [number, number],
  );
  svg.polyline(theo, { stroke: COLOR_THEORY, "stroke-width": 1.8 });
  for (const seg of segments(data.alpha_grid, data.data_psi)) {
    svg.polyline(
      seg.map(([x, y]) => [f.x(x), f.y(y)] as [number, number]),
      { stroke: COLOR_DATA, "stroke-width": 1.8 },
    );
  }
}

/** One panel per envelope bundle, laid out left to right. */
export function renderEnvelopePanels(bundles: EnvelopeBundle[]): string {
  const svg = new SvgCanvas(PANEL_W * bundles.length, PANEL_H);
  bundles.forEach((b, i) => {
    envelopePanel(svg, { x: i * PANEL_W, y: 0, width: PANEL_W, height: PANEL_H }, b);
  });
  return svg.toString();
}

/** Raw per-position transformed-count curves across samples. */
export function renderOverlay(data: Overlay): string {
  const svg = new SvgCanvas(PANEL_W, PANEL_H);
  const allVals = data.series.flat();
  const nMax = Math.max(...data.series.map((s) => s.length));
  const f = drawFrame(
    svg,
    { x: 0, y: 0, width: PANEL_W, height: PANEL_H },
    [1, Math.max(nMax, 2)],
    padded(extent(allVals)),
    {
      title: `raw curves — ${data.gene_id} (d=${data.d}, n=${data.n})`,
      xLabel: "sample",
      yLabel: "transformed count",
    },
  );
  for (const series of data.series) {
    const pts = series.map(
      (v, j) => [f.x(j + 1), f.y(v)] as [number, number],
    );
    svg.polyline(pts, {
      stroke: COLOR_DATA,
      "stroke-width": 0.8,
      "stroke-opacity": 0.35,
    });
  }
  return svg.toString();
}
