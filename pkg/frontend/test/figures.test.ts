import assert from "node:assert/strict";
import { test } from "node:test";

import { parseCsv } from "../src/csv";
import { buildFigure, fitSlope, sidecarJson } from "../src/figures";

const HEADER =
  "experiment,kind,dist,n1,n2,p,m,q,trial,seed,error_ratio,iters,converged,wall_ms";

function makeCsv(
  rows: Array<{ kind: string; dist: string; m: number; trial: number; err: number }>
): string {
  const lines = [HEADER];
  for (const r of rows) {
    lines.push(
      `sweep-m,${r.kind},${r.dist},8,8,4,${r.m},0.2,${r.trial},7,${r.err},0,true,1.0`
    );
  }
  return lines.join("\n");
}

test("mean over trials per sweep point", () => {
  const csv = makeCsv([
    { kind: "well", dist: "gr", m: 10, trial: 0, err: 1.0 },
    { kind: "well", dist: "gr", m: 10, trial: 1, err: 3.0 },
    { kind: "well", dist: "gr", m: 20, trial: 0, err: 0.5 },
  ]);
  const data = buildFigure(parseCsv(csv), "m");
  assert.equal(data.series.length, 1);
  assert.deepEqual(data.series[0].x, [10, 20]);
  assert.deepEqual(data.series[0].y, [2.0, 0.5]);
});

test("fig1-style input yields six series, dense ones dashed", () => {
  const rows: Array<{ kind: string; dist: string; m: number; trial: number; err: number }> = [];
  for (const kind of ["well", "ill", "structured"]) {
    for (const dist of ["gr", "dense_g"]) {
      for (const m of [100, 200]) {
        rows.push({ kind, dist, m, trial: 0, err: 1.0 / m });
      }
    }
  }
  const data = buildFigure(parseCsv(makeCsv(rows)), "m");
  assert.equal(data.series.length, 6);
  for (const s of data.series) {
    assert.equal(s.dashed, s.dist === "dense_g");
  }
});

test("synthetic power law y = x^-1 fits slope -1.00 within 0.01", () => {
  const rows = [10, 20, 40, 80, 160].map((m) => ({
    kind: "well",
    dist: "gr",
    m,
    trial: 0,
    err: 1.0 / m,
  }));
  const data = buildFigure(parseCsv(makeCsv(rows)), "m");
  const slope = data.series[0].slope;
  assert.ok(slope !== null && Math.abs(slope + 1.0) < 0.01, `slope ${slope}`);
});

test("fitSlope needs two positive points", () => {
  assert.equal(fitSlope([1], [1]), null);
  assert.equal(fitSlope([1, 2], [0, -1]), null);
});

test("bounded figure keeps only the well-conditioned group", () => {
  const csv = makeCsv([
    { kind: "well", dist: "rr", m: 10, trial: 0, err: 0.5 },
    { kind: "ill", dist: "rr", m: 10, trial: 0, err: 0.9 },
  ]);
  const data = buildFigure(parseCsv(csv), "bounded");
  assert.equal(data.series.length, 1);
  assert.equal(data.series[0].kind, "well");
});

test("empty group after filtering carries a warning", () => {
  const csv = makeCsv([{ kind: "ill", dist: "gr", m: 10, trial: 0, err: 0.5 }]);
  const data = buildFigure(parseCsv(csv), "bounded");
  assert.equal(data.series.length, 0);
  assert.ok(data.warning !== null);
});

test("sidecar json is byte-stable", () => {
  const csv = makeCsv([
    { kind: "well", dist: "gr", m: 10, trial: 0, err: 1 / 3 },
    { kind: "well", dist: "gr", m: 20, trial: 0, err: 1 / 7 },
  ]);
  const a = sidecarJson(buildFigure(parseCsv(csv), "m"));
  const b = sidecarJson(buildFigure(parseCsv(csv), "m"));
  assert.equal(a, b);
  assert.ok(a.endsWith("\n"));
});
