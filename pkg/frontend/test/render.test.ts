import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  COLOR_DATA,
  COLOR_ENVELOPE,
  COLOR_THEORY,
  renderEnvelopePanels,
  renderEsdMp,
  renderOverlay,
  renderPsiCurve,
} from "../src/render.js";
import {
  envelopeSchema,
  histogramSchema,
  overlaySchema,
  psiCurveSchema,
} from "../src/schemas.js";

const FIXTURES = fileURLToPath(new URL("../fixtures", import.meta.url));
const load = (name: string) =>
  JSON.parse(fs.readFileSync(path.join(FIXTURES, name), "utf8"));

function expectSvg(svg: string): void {
  expect(svg.startsWith("<svg")).toBe(true);
  expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  expect(svg.length).toBeGreaterThan(500);
}

describe("renderers", () => {
  it("esd_mp: red histogram with black theoretical overlay", () => {
    const svg = renderEsdMp(histogramSchema.parse(load("esd_mp.json")));
    expectSvg(svg);
    expect(svg).toContain(`fill="${COLOR_DATA}"`);
    expect(svg).toContain(`stroke="${COLOR_THEORY}"`);
  });

  it("esd_mp without overlay still renders", () => {
    const data = histogramSchema.parse(load("esd_mp.json"));
    delete (data as Record<string, unknown>).mp_overlay;
    expectSvg(renderEsdMp(data));
  });

  it("psi_curve: black curve broken at inadmissible points", () => {
    const data = psiCurveSchema.parse(load("psi_curve.json"));
    const svg = renderPsiCurve(data);
    expectSvg(svg);
    expect(svg).toContain(`stroke="${COLOR_THEORY}"`);
    expect(svg).not.toContain("NaN");
  });

  it("envelope_panels: blue band, black theory, red data, one panel per bundle", () => {
    const bundle = envelopeSchema.parse(load("envelope.json"));
    const one = renderEnvelopePanels([bundle]);
    const two = renderEnvelopePanels([bundle, bundle]);
    expectSvg(one);
    expectSvg(two);
    for (const color of [COLOR_ENVELOPE, COLOR_THEORY, COLOR_DATA]) {
      expect(one).toContain(`stroke="${color}"`);
    }
    const widthOf = (svg: string) => Number(/width="(\d+)"/.exec(svg)![1]);
    expect(widthOf(two)).toBe(2 * widthOf(one));
  });

  it("overlay: red raw-data curves", () => {
    const svg = renderOverlay(overlaySchema.parse(load("overlay.json")));
    expectSvg(svg);
    expect(svg).toContain(`stroke="${COLOR_DATA}"`);
  });

  it("is deterministic", () => {
    const data = histogramSchema.parse(load("esd_mp.json"));
    expect(renderEsdMp(data)).toBe(renderEsdMp(data));
  });
});
