import { readFileSync } from "fs";
import Papa from "papaparse";

export interface Table {
  columns: string[];
  rows: Record<string, number>[];
}

export class InputError extends Error {}

/** Parse a numeric CSV with a mandatory header row. */
export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new InputError(`cannot read input file ${path}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new InputError(`cannot parse ${path}: ${parsed.errors[0].message}`);
  }
  const columns = parsed.meta.fields ?? [];
  if (columns.length === 0) {
    throw new InputError(`${path} has no header row`);
  }
  if (parsed.data.length === 0) {
    throw new InputError(`${path}: no data rows`);
  }
  const rows = parsed.data.map((raw, i) => {
    const row: Record<string, number> = {};
    for (const col of columns) {
      const value = Number(raw[col]);
      if (!Number.isFinite(value)) {
        throw new InputError(`${path} row ${i + 1}: column ${col} is not a finite number`);
      }
      row[col] = value;
    }
    return row;
  });
  return { columns, rows };
}

/** Fail with the missing column's name unless all are present. */
export function requireColumns(table: Table, names: string[], path: string): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new InputError(`${path} is missing required column ${name}`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  return table.rows.map((r) => r[name]);
}
