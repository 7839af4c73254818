import { z } from "zod";

// One plotted series: a CSV file plus its legend label.
const series = z.object({
  path: z.string().min(1),
  label: z.string().min(1),
});

// Counting rates against optical depth, three lines on shared axes.
const ratesRecipe = z.object({
  figure: z.literal("fig2"),
  odscan: z.string().min(1),
  title: z.string().default("counting rates vs optical depth"),
  output: z.string().min(1),
});

// Measured scan points with fit overlays (straight lines through the
// singles, a parabola through the coincidences) and a log-log inset of
// the heralding efficiency with its fitted slope.
const odFitRecipe = z.object({
  figure: z.literal("fig3"),
  odscan: z.string().min(1),
  fits: z.string().min(1),
  title: z.string().default("optical-depth scaling with fits"),
  output: z.string().min(1),
});

// Filtered detector-plane correlations overlaid per absorption depth,
// with the two-lobed power spectra as an inset.
const beatsRecipe = z.object({
  figure: z.literal("fig4"),
  curves: z.array(series).min(1),
  spectra: z.array(series).min(1),
  title: z.string().default("filtered correlation beats"),
  output: z.string().min(1),
});

export const recipeSchema = z.discriminatedUnion("figure", [
  ratesRecipe,
  odFitRecipe,
  beatsRecipe,
]);

export type Recipe = z.infer<typeof recipeSchema>;
export type RatesRecipe = z.infer<typeof ratesRecipe>;
export type OdFitRecipe = z.infer<typeof odFitRecipe>;
export type BeatsRecipe = z.infer<typeof beatsRecipe>;
