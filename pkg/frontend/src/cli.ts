import fs from "node:fs";
import path from "node:path";
import { pathToFileURL } from "node:url";
import { ZodError } from "zod";
import { recipeSchema } from "./schema.js";
import { renderRecipe } from "./render.js";
import { SchemaError } from "./csv.js";

/**
 * plotkit --recipe PATH
 *
 * Reads a JSON recipe, renders the figure it describes from CSV inputs,
 * and writes the SVG named by the recipe. Paths inside the recipe are
 * relative to the recipe file. Nothing is written unless the render
 * succeeds in full.
 */
export function main(argv: string[]): number {
  const i = argv.indexOf("--recipe");
  if (i < 0 || i + 1 >= argv.length) {
    console.error("usage: plotkit --recipe PATH");
    return 2;
  }
  const recipePath = argv[i + 1];

  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(recipePath, "utf8"));
  } catch (e) {
    console.error(`error: cannot read recipe ${recipePath}: ${(e as Error).message}`);
    return 2;
  }

  let recipe;
  try {
    recipe = recipeSchema.parse(raw);
  } catch (e) {
    if (e instanceof ZodError) {
      const why = e.issues.map((x) => `${x.path.join(".") || "recipe"}: ${x.message}`).join("; ");
      console.error(`error: invalid recipe ${recipePath}: ${why}`);
      return 2;
    }
    throw e;
  }

  const base = path.dirname(path.resolve(recipePath));
  let svg: string;
  try {
    svg = renderRecipe(recipe, base);
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`error: ${e.message}`);
      return 3;
    }
    throw e;
  }
  const out = path.resolve(base, recipe.output);
  fs.mkdirSync(path.dirname(out), { recursive: true });
  fs.writeFileSync(out, svg);
  console.log(`wrote ${out}`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
