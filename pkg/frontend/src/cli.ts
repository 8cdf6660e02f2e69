#!/usr/bin/env node
/**
 * plots CLI: render one log-log figure from experiment CSVs.
 *
 *   plots --csv FILE [--csv FILE ...] --fig {m,p,q,bounded} --out PATH
 *
 * Writes the SVG chart to PATH and the exact plotted series to
 * PATH + ".json" (the sidecar is byte-stable across runs on the same
 * input).  Exit codes: 0 success (including empty-after-filter charts,
 * which carry a warning annotation), 2 schema/usage errors.
 */

import { writeFileSync } from "fs";

import { readCsvFiles, SchemaError } from "./csv";
import { buildFigure, FigureKind, sidecarJson } from "./figures";
import { renderSvg } from "./svg";

interface CliArgs {
  csv: string[];
  fig: FigureKind;
  out: string;
}

export function parseArgs(argv: string[]): CliArgs {
  const csv: string[] = [];
  let fig: string | null = null;
  let out: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) {
        throw new Error(`missing value for ${arg}`);
      }
      return argv[++i];
    };
    if (arg === "--csv") {
      csv.push(next());
    } else if (arg === "--fig") {
      fig = next();
    } else if (arg === "--out") {
      out = next();
    } else {
      throw new Error(`unknown argument: ${arg}`);
    }
  }
  if (csv.length === 0 || fig === null || out === null) {
    throw new Error("usage: plots --csv FILE [--csv FILE ...] --fig {m,p,q,bounded} --out PATH");
  }
  if (!["m", "p", "q", "bounded"].includes(fig)) {
    throw new Error(`unknown figure kind: ${fig}`);
  }
  return { csv, fig: fig as FigureKind, out };
}

export function main(argv: string[]): number {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const rows = readCsvFiles(args.csv);
    const data = buildFigure(rows, args.fig);
    writeFileSync(args.out, renderSvg(data));
    writeFileSync(args.out + ".json", sidecarJson(data));
    if (data.warning !== null) {
      console.error(`warning: ${data.warning}`);
    }
    console.log(`${args.out} (${data.series.length} series)`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error in column "${err.column}": ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
