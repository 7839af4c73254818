import fs from "node:fs";
import path from "node:path";
import Papa from "papaparse";

/** Raised when a CSV does not match the documented schema. */
export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  /** Column name to numeric values, all the same length, at least one row. */
  data: Map<string, number[]>;
  nRows: number;
}

function parseCsv(file: string): { fields: string[]; rows: Record<string, unknown>[] } {
  let text: string;
  try {
    text = fs.readFileSync(file, "utf8");
  } catch {
    throw new SchemaError(`cannot read ${file}`);
  }
  const parsed = Papa.parse<Record<string, unknown>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
    dynamicTyping: true,
  });
  const fields = parsed.meta.fields ?? [];
  return { fields, rows: parsed.data };
}

/**
 * Read a numeric CSV and check it against the expected column set.
 * Every required column must exist and hold finite numbers in every row.
 */
export function readTable(file: string, required: string[]): Table {
  const name = path.basename(file);
  const { fields, rows } = parseCsv(file);
  for (const col of required) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${name}: missing column "${col}"`);
    }
  }
  if (rows.length === 0) {
    throw new SchemaError(`${name}: no data rows`);
  }
  const data = new Map<string, number[]>();
  for (const col of required) data.set(col, []);
  rows.forEach((row, i) => {
    for (const col of required) {
      const v = row[col];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new SchemaError(`${name}: row ${i + 2}, column "${col}" is not a finite number`);
      }
      data.get(col)!.push(v);
    }
  });
  return { columns: fields, data, nRows: rows.length };
}

/** Read a name,value fit table into a map. */
export function readFits(file: string): Map<string, number> {
  const name = path.basename(file);
  const { fields, rows } = parseCsv(file);
  for (const col of ["name", "value"]) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${name}: missing column "${col}"`);
    }
  }
  if (rows.length === 0) {
    throw new SchemaError(`${name}: no data rows`);
  }
  const out = new Map<string, number>();
  rows.forEach((row, i) => {
    const key = row["name"];
    const val = row["value"];
    if (typeof key !== "string" || typeof val !== "number" || !Number.isFinite(val)) {
      throw new SchemaError(`${name}: row ${i + 2} is not a name,value pair`);
    }
    out.set(key, val);
  });
  return out;
}

/** Look up a fitted quantity, failing with its name when absent. */
export function fitValue(fits: Map<string, number>, key: string, file: string): number {
  const v = fits.get(key);
  if (v === undefined) {
    throw new SchemaError(`${path.basename(file)}: missing row "${key}"`);
  }
  return v;
}
