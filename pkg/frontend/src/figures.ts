/**
 * Figure assembly: group rows, average error ratios per sweep point, and
 * fit per-series log-log slopes for annotation.
 *
 * Series keyed by (kind, dist); dense reference operators are drawn dashed,
 * tensor sketches solid, matching the benchmark's visual convention.
 */

import { ResultRow } from "./csv";

export type FigureKind = "m" | "p" | "q" | "bounded";

export const FIGURE_X_FIELD: Record<FigureKind, "m" | "p" | "q"> = {
  m: "m",
  p: "p",
  q: "q",
  bounded: "m",
};

const DASHED_DISTS = new Set(["dense_g", "dense_r"]);

export interface Series {
  key: string;
  kind: string;
  dist: string;
  dashed: boolean;
  x: number[];
  y: number[];
  slope: number | null;
}

export interface FigureData {
  figure: FigureKind;
  xField: string;
  series: Series[];
  warning: string | null;
}

export function fitSlope(x: number[], y: number[]): number | null {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < x.length; i++) {
    if (x[i] > 0 && y[i] > 0) {
      pts.push([Math.log(x[i]), Math.log(y[i])]);
    }
  }
  if (pts.length < 2) {
    return null;
  }
  const n = pts.length;
  const sx = pts.reduce((a, p) => a + p[0], 0);
  const sy = pts.reduce((a, p) => a + p[1], 0);
  const sxx = pts.reduce((a, p) => a + p[0] * p[0], 0);
  const sxy = pts.reduce((a, p) => a + p[0] * p[1], 0);
  const denom = n * sxx - sx * sx;
  if (denom === 0) {
    return null;
  }
  return (n * sxy - sx * sy) / denom;
}

export function buildFigure(rows: ResultRow[], figure: FigureKind): FigureData {
  const xField = FIGURE_X_FIELD[figure];
  const filtered =
    figure === "bounded" ? rows.filter((r) => r.kind === "well") : rows;

  // group -> x -> error ratios
  const groups = new Map<string, Map<number, number[]>>();
  for (const row of filtered) {
    const key = `${row.kind}|${row.dist}`;
    if (!groups.has(key)) {
      groups.set(key, new Map());
    }
    const byX = groups.get(key)!;
    const x = row[xField];
    if (!byX.has(x)) {
      byX.set(x, []);
    }
    byX.get(x)!.push(row.error_ratio);
  }

  const series: Series[] = [];
  const keys = Array.from(groups.keys()).sort();
  for (const key of keys) {
    const [kind, dist] = key.split("|");
    const byX = groups.get(key)!;
    const xs = Array.from(byX.keys()).sort((a, b) => a - b);
    const ys = xs.map((x) => {
      const values = byX.get(x)!;
      return values.reduce((a, v) => a + v, 0) / values.length;
    });
    series.push({
      key,
      kind,
      dist,
      dashed: DASHED_DISTS.has(dist),
      x: xs,
      y: ys,
      slope: fitSlope(xs, ys),
    });
  }

  return {
    figure,
    xField,
    series,
    warning: series.length === 0 ? "no data after filtering" : null,
  };
}

/** Deterministic sidecar text: fixed key order, 17-significant-digit floats. */
export function sidecarJson(data: FigureData): string {
  const fmt = (v: number) => Number(v.toPrecision(17));
  const payload = {
    figure: data.figure,
    x_field: data.xField,
    warning: data.warning,
    series: data.series.map((s) => ({
      kind: s.kind,
      dist: s.dist,
      dashed: s.dashed,
      slope: s.slope === null ? null : fmt(s.slope),
      x: s.x.map(fmt),
      y: s.y.map(fmt),
    })),
  };
  return JSON.stringify(payload, null, 2) + "\n";
}
