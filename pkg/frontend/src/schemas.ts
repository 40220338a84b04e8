import { z } from "zod";

const finite = z.number().finite();
const numOrNull = z.union([finite, z.null()]);

export const psdSchema = z.object({
  model: z.enum(["point_mass", "truncated_gamma", "discrete"]),
  params: z.record(z.unknown()),
});

export const histogramSchema = z.object({
  bin_edges: z.array(finite).min(2),
  counts: z.array(z.number().int().nonnegative()).min(1),
  total: z.number().int().nonnegative(),
  drop_top: z.number().int().nonnegative(),
  gene_id: z.string().optional(),
  mp_overlay: z
    .object({
      sigma2: finite,
      y: finite,
      x: z.array(finite),
      density: z.array(finite),
    })
    .optional(),
});

export const psiCurveSchema = z.object({
  alpha_grid: z.array(finite).min(2),
  psi_values: z.array(numOrNull),
  admissible: z.array(z.boolean()),
  support: z
    .object({
      intervals: z.array(z.tuple([finite, finite])),
      upper_edge: finite,
      zero_atom: z.boolean().optional(),
    })
    .optional(),
  psd: psdSchema.optional(),
});

export const envelopeSchema = z.object({
  alpha_grid: z.array(finite).min(2),
  theoretical_psi: z.array(finite),
  envelopes: z.array(z.array(numOrNull)).min(1),
  data_psi: z.array(numOrNull),
  inside: z.array(z.boolean()),
  coverage_fraction: z.number().min(0).max(1),
  coverage_pass: z.boolean().optional(),
  psd: psdSchema,
  d: z.number().int().positive(),
  n: z.number().int().positive(),
  Q: z.number().int().positive(),
  seed: z.number().int(),
});

export const overlaySchema = z.object({
  gene_id: z.string(),
  d: z.number().int().positive(),
  n: z.number().int().positive(),
  series: z.array(z.array(finite).min(1)).min(1),
});

export const figureKinds = [
  "esd_mp",
  "psi_curve",
  "envelope_panels",
  "overlay",
] as const;
export type FigureKind = (typeof figureKinds)[number];

export const figureSpecSchema = z
  .object({
    kind: z.enum(figureKinds),
    inputs: z.array(z.string()).min(1),
    output: z.string().min(1),
  })
  .refine((fig) => fig.kind === "envelope_panels" || fig.inputs.length === 1, {
    message: "only envelope_panels accepts multiple inputs",
    path: ["inputs"],
  });

export const figureManifestSchema = z.object({
  figures: z.array(figureSpecSchema).min(1),
});

export type Histogram = z.infer<typeof histogramSchema>;
export type PsiCurve = z.infer<typeof psiCurveSchema>;
export type EnvelopeBundle = z.infer<typeof envelopeSchema>;
export type Overlay = z.infer<typeof overlaySchema>;
export type FigureSpec = z.infer<typeof figureSpecSchema>;
export type FigureManifest = z.infer<typeof figureManifestSchema>;

export const inputSchemaFor: Record<FigureKind, z.ZodTypeAny> = {
  esd_mp: histogramSchema,
  psi_curve: psiCurveSchema,
  envelope_panels: envelopeSchema,
  overlay: overlaySchema,
};

export class SchemaMismatch extends Error {
  constructor(
    public readonly file: string,
    public readonly fieldPath: string,
    detail: string,
  ) {
    super(`${file}: ${fieldPath || "(root)"}: ${detail}`);
    this.name = "SchemaMismatch";
  }
}

/** Parse `raw` against the schema, raising with the offending field path. */
export function parseOrThrow<T>(
  schema: z.ZodType<T>,
  raw: unknown,
  file: string,
): T {
  const res = schema.safeParse(raw);
  if (!res.success) {
    const issue = res.error.issues[0];
    throw new SchemaMismatch(file, issue.path.join("."), issue.message);
  }
  return res.data;
}
