/**
 * Reader for the versioned CSV tables the sgqei driver writes.
 *
 * Every table starts with two bookkeeping columns, schema_version and
 * config_hash, on the header and on each data row.  Anything that does
 * not fit that shape is rejected with an exit code the CLI passes
 * through: 1 for an empty table, 2 for a schema problem.
 */

import Papa from "papaparse";

export interface Table {
  schema: string;
  hash: string;
  columns: string[];
  rows: Record<string, string>[];
}

export class DataError extends Error {
  constructor(message: string, readonly exitCode: number) {
    super(message);
  }
}

export function parseTable(
  text: string,
  expected: string,
  requiredColumns: string[] = [],
): Table {
  if (text.trim() === "") {
    throw new DataError("no rows", 1);
  }
  const parsed = Papa.parse<string[]>(text, { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new DataError(`CSV parse error: ${e.message}`, 2);
  }
  const grid = parsed.data;
  if (grid.length === 0) {
    throw new DataError("no rows", 1);
  }
  const header = grid[0];
  if (header[0] !== "schema_version" || header[1] !== "config_hash") {
    throw new DataError(
      `not a versioned table: header starts with ${header.slice(0, 2).join(", ")}`,
      2,
    );
  }
  const body = grid.slice(1);
  if (body.length === 0) {
    throw new DataError("no rows", 1);
  }
  const found = body[0][0];
  if (found !== expected) {
    throw new DataError(`schema mismatch: expected ${expected}, found ${found}`, 2);
  }
  for (const name of requiredColumns) {
    if (!header.includes(name)) {
      throw new DataError(`schema mismatch: ${expected} is missing column ${name}`, 2);
    }
  }
  const rows = body.map((cells, i) => {
    if (cells.length !== header.length) {
      throw new DataError(
        `row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
        2,
      );
    }
    if (cells[0] !== found) {
      throw new DataError(`row ${i + 1} changes schema_version to ${cells[0]}`, 2);
    }
    const rec: Record<string, string> = {};
    header.forEach((name, j) => {
      rec[name] = cells[j];
    });
    return rec;
  });
  return { schema: found, hash: body[0][1], columns: header.slice(2), rows };
}

/** Numeric cell access; empty cells come back as NaN, inf as Infinity. */
export function num(row: Record<string, string>, key: string): number {
  const raw = row[key];
  if (raw === undefined) {
    throw new DataError(`missing column ${key}`, 2);
  }
  if (raw === "") return NaN;
  if (raw === "inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  return Number(raw);
}
