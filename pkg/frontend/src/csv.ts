/**
 * Reader for the experiment-runner CSV schema.
 *
 * The header is fixed; any missing column is a schema error that names the
 * offending column so the caller can exit with a config-error code.
 */

import { readFileSync } from "fs";

export const REQUIRED_COLUMNS = [
  "experiment",
  "kind",
  "dist",
  "n1",
  "n2",
  "p",
  "m",
  "q",
  "trial",
  "seed",
  "error_ratio",
  "iters",
  "converged",
  "wall_ms",
] as const;

export interface ResultRow {
  experiment: string;
  kind: string;
  dist: string;
  n1: number;
  n2: number;
  p: number;
  m: number;
  q: number;
  trial: number;
  seed: string;
  error_ratio: number;
  iters: number;
  converged: boolean;
  wall_ms: number;
}

export class SchemaError extends Error {
  readonly column: string;

  constructor(column: string, message: string) {
    super(message);
    this.column = column;
  }
}

export function parseCsv(text: string, source = "<csv>"): ResultRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("experiment", `${source}: empty file, header missing`);
  }
  const header = lines[0].split(",");
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const column of REQUIRED_COLUMNS) {
    if (!index.has(column)) {
      throw new SchemaError(column, `${source}: missing required column "${column}"`);
    }
  }
  const at = (cells: string[], column: string) => cells[index.get(column)!];
  const num = (cells: string[], column: string, line: number): number => {
    const value = Number(at(cells, column));
    if (!Number.isFinite(value)) {
      throw new SchemaError(column, `${source}:${line}: non-numeric value in "${column}"`);
    }
    return value;
  };

  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length < header.length) {
      throw new SchemaError("experiment", `${source}:${i + 1}: short row`);
    }
    rows.push({
      experiment: at(cells, "experiment"),
      kind: at(cells, "kind"),
      dist: at(cells, "dist"),
      n1: num(cells, "n1", i + 1),
      n2: num(cells, "n2", i + 1),
      p: num(cells, "p", i + 1),
      m: num(cells, "m", i + 1),
      q: num(cells, "q", i + 1),
      trial: num(cells, "trial", i + 1),
      seed: at(cells, "seed"),
      error_ratio: num(cells, "error_ratio", i + 1),
      iters: num(cells, "iters", i + 1),
      converged: at(cells, "converged") === "true",
      wall_ms: num(cells, "wall_ms", i + 1),
    });
  }
  return rows;
}

export function readCsvFiles(paths: string[]): ResultRow[] {
  const rows: ResultRow[] = [];
  for (const path of paths) {
    rows.push(...parseCsv(readFileSync(path, "utf8"), path));
  }
  return rows;
}
