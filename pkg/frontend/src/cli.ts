#!/usr/bin/env node
/**
 * render --kind {bound_vs_param,order_decay,qei_band} --in table.csv --out figure.svg
 *
 * Exit codes: 0 figure written, 1 empty input table, 2 usage or schema
 * error.  Output bytes are a pure function of the input file.
 */

import { mkdirSync, readFileSync, realpathSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { DataError, parseTable } from "./csv.js";
import { KINDS } from "./figures.js";

const USAGE =
  "usage: render --kind {bound_vs_param,order_decay,qei_band} --in table.csv --out figure.svg";

export function main(argv: string[]): number {
  let values: { kind?: string; in?: string; out?: string };
  try {
    values = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
      },
      allowPositionals: false,
    }).values;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    console.error(USAGE);
    return 2;
  }
  const { kind, in: input, out } = values;
  if (!kind || !input || !out) {
    console.error(USAGE);
    return 2;
  }
  const spec = KINDS[kind];
  if (!spec) {
    console.error(`unknown kind ${kind!}; expected one of ${Object.keys(KINDS).join(", ")}`);
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    console.error(`cannot read ${input}: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
  try {
    const table = parseTable(text, spec.schema, spec.columns);
    const svg = spec.render(table);
    const dir = dirname(out);
    if (dir && dir !== ".") mkdirSync(dir, { recursive: true });
    writeFileSync(out, svg);
  } catch (err) {
    if (err instanceof DataError) {
      console.error(err.message);
      return err.exitCode;
    }
    throw err;
  }
  return 0;
}

const entry = process.argv[1]
  ? pathToFileURL(realpathSync(process.argv[1])).href
  : "";
if (import.meta.url === entry) {
  process.exit(main(process.argv.slice(2)));
}
