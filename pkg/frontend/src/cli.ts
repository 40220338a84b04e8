#!/usr/bin/env node
/** render_figs <manifest.json> --out figs/
 *
 * Reads a figure manifest, validates every referenced JSON artifact against
 * its figure kind's schema, and writes one SVG per figure into the output
 * directory.  Exits 2 on usage/IO errors and 1 on schema mismatches.
 */
import * as fs from "node:fs";
import * as path from "node:path";

import {
  renderEnvelopePanels,
  renderEsdMp,
  renderOverlay,
  renderPsiCurve,
} from "./render.js";
import {
  SchemaMismatch,
  envelopeSchema,
  figureManifestSchema,
  histogramSchema,
  overlaySchema,
  parseOrThrow,
  psiCurveSchema,
  type FigureSpec,
} from "./schemas.js";

export const EXIT_OK = 0;
export const EXIT_SCHEMA = 1;
export const EXIT_USAGE = 2;

function readJson(file: string): unknown {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf8");
  } catch (err) {
    throw new UsageError(`cannot read ${file}: ${(err as Error).message}`);
  }
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new SchemaMismatch(file, "", `invalid JSON: ${(err as Error).message}`);
  }
}

class UsageError extends Error {}

function renderFigure(fig: FigureSpec, baseDir: string): string {
  const inputs = fig.inputs.map((p) => path.resolve(baseDir, p));
  switch (fig.kind) {
    case "esd_mp":
      return renderEsdMp(parseOrThrow(histogramSchema, readJson(inputs[0]), inputs[0]));
    case "psi_curve":
      return renderPsiCurve(parseOrThrow(psiCurveSchema, readJson(inputs[0]), inputs[0]));
    case "envelope_panels":
      return renderEnvelopePanels(
        inputs.map((p) => parseOrThrow(envelopeSchema, readJson(p), p)),
      );
    case "overlay":
      return renderOverlay(parseOrThrow(overlaySchema, readJson(inputs[0]), inputs[0]));
  }
}

export interface CliIO {
  stderr: (line: string) => void;
  stdout: (line: string) => void;
}

export function runCli(argv: string[], io?: CliIO): number {
  const err = io?.stderr ?? ((l: string) => process.stderr.write(l + "\n"));
  const out = io?.stdout ?? ((l: string) => process.stdout.write(l + "\n"));

  try {
    let manifestPath: string | undefined;
    let outDir = "figs";
    for (let i = 0; i < argv.length; i++) {
      const a = argv[i];
      if (a === "--out") {
        outDir = argv[++i];
        if (outDir === undefined) throw new UsageError("--out requires a value");
      } else if (a.startsWith("--")) {
        throw new UsageError(`unknown option ${a}`);
      } else if (manifestPath === undefined) {
        manifestPath = a;
      } else {
        throw new UsageError(`unexpected argument ${a}`);
      }
    }
    if (manifestPath === undefined) {
      throw new UsageError("usage: render_figs <manifest.json> --out <dir>");
    }

    const manifest = parseOrThrow(
      figureManifestSchema,
      readJson(manifestPath),
      manifestPath,
    );
    const baseDir = path.dirname(path.resolve(manifestPath));
    fs.mkdirSync(outDir, { recursive: true });

    for (const fig of manifest.figures) {
      const svg = renderFigure(fig, baseDir);
      const dest = path.join(outDir, fig.output);
      fs.mkdirSync(path.dirname(dest), { recursive: true });
      fs.writeFileSync(dest, svg);
      out(`wrote ${dest}`);
    }
    return EXIT_OK;
  } catch (e) {
    if (e instanceof SchemaMismatch) {
      err(`schema mismatch: ${e.message}`);
      return EXIT_SCHEMA;
    }
    if (e instanceof UsageError) {
      err(`error: ${e.message}`);
      return EXIT_USAGE;
    }
    err(`error: ${(e as Error).message}`);
    return EXIT_USAGE;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isMain) {
  process.exit(runCli(process.argv.slice(2)));
}
