import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { DataError, num, parseTable } from "../src/csv";

const fixture = (name: string) =>
  readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf8");

describe("parseTable", () => {
  it("reads a sweep table", () => {
    const t = parseTable(fixture("sweep.csv"), "sweep.v1");
    expect(t.schema).toBe("sweep.v1");
    expect(t.hash).toMatch(/^[0-9a-f]{12}$/);
    expect(t.rows).toHaveLength(5);
    expect(t.columns).toContain("K_total");
    expect(t.rows[0].parameter).toBe("a");
  });

  it("rejects a schema mismatch with exit code 2", () => {
    let caught: unknown;
    try {
      parseTable(fixture("energy.csv"), "sweep.v1");
    } catch (err) {
      caught = err;
    }
    expect(caught).toBeInstanceOf(DataError);
    expect((caught as DataError).exitCode).toBe(2);
    expect((caught as DataError).message).toContain("schema mismatch");
  });

  it("rejects a header-only table with exit code 1", () => {
    const text = "schema_version,config_hash,a,b\r\n";
    expect(() => parseTable(text, "x.v1")).toThrowError("no rows");
    try {
      parseTable(text, "x.v1");
    } catch (err) {
      expect((err as DataError).exitCode).toBe(1);
    }
  });

  it("rejects an empty file with exit code 1", () => {
    try {
      parseTable("", "x.v1");
      expect.unreachable();
    } catch (err) {
      expect((err as DataError).exitCode).toBe(1);
    }
  });

  it("rejects a table without the bookkeeping columns", () => {
    const text = "a,b,c\r\n1,2,3\r\n";
    try {
      parseTable(text, "x.v1");
      expect.unreachable();
    } catch (err) {
      expect((err as DataError).exitCode).toBe(2);
    }
  });

  it("rejects a missing required column as a schema mismatch", () => {
    const text = "schema_version,config_hash,a\r\nx.v1,000000000000,1\r\n";
    try {
      parseTable(text, "x.v1", ["b"]);
      expect.unreachable();
    } catch (err) {
      expect((err as DataError).exitCode).toBe(2);
      expect((err as DataError).message).toContain("missing column b");
    }
  });

  it("rejects ragged rows", () => {
    const text = "schema_version,config_hash,a\r\nx.v1,000000000000,1,9\r\n";
    try {
      parseTable(text, "x.v1");
      expect.unreachable();
    } catch (err) {
      expect((err as DataError).exitCode).toBe(2);
    }
  });

  it("unquotes embedded commas", () => {
    const text = 'schema_version,config_hash,x\r\nx.v1,000000000000,"with,comma"\r\n';
    const t = parseTable(text, "x.v1");
    expect(t.rows[0].x).toBe("with,comma");
  });
});

describe("num", () => {
  it("maps empty cells to NaN and inf spellings to infinities", () => {
    const row = { a: "", b: "inf", c: "-inf", d: "2.5" };
    expect(num(row, "a")).toBeNaN();
    expect(num(row, "b")).toBe(Infinity);
    expect(num(row, "c")).toBe(-Infinity);
    expect(num(row, "d")).toBe(2.5);
  });

  it("throws on a missing column", () => {
    expect(() => num({}, "nope")).toThrowError("missing column nope");
  });
});
