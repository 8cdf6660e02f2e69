/**
 * Minimal dependency-free SVG renderer for log-log line charts.
 *
 * Output is deterministic text: coordinates are written with fixed
 * precision so identical figure data produces identical bytes.
 */

import { FigureData, Series } from "./figures";

const WIDTH = 760;
const HEIGHT = 520;
const MARGIN = { left: 70, right: 230, top: 40, bottom: 55 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const TITLES: Record<string, string> = {
  m: "Error ratio vs sketch rows m",
  p: "Error ratio vs unknowns p",
  q: "Error ratio vs density level q",
  bounded: "Bounded vs unbounded factor laws",
};

function fmt(v: number): string {
  return v.toFixed(2);
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

interface LogScale {
  (value: number): number;
  ticks: number[];
}

function logScale(values: number[], outMin: number, outMax: number): LogScale {
  const positive = values.filter((v) => v > 0);
  const lo = positive.length ? Math.min(...positive) : 0.1;
  const hi = positive.length ? Math.max(...positive) : 1.0;
  let logLo = Math.floor(Math.log10(lo) * 1e9) / 1e9;
  let logHi = Math.ceil(Math.log10(hi) * 1e9) / 1e9;
  if (logHi - logLo < 1e-9) {
    logLo -= 0.5;
    logHi += 0.5;
  }
  const scale = ((value: number) =>
    outMin + ((Math.log10(value) - logLo) / (logHi - logLo)) * (outMax - outMin)) as LogScale;
  // 1-2-5 series keeps readable ticks even when the range spans less
  // than one decade
  const ticks: number[] = [];
  for (let e = Math.floor(logLo) - 1; e <= Math.ceil(logHi); e++) {
    for (const mult of [1, 2, 5]) {
      const t = mult * Math.pow(10, e);
      const lt = Math.log10(t);
      if (lt >= logLo - 1e-12 && lt <= logHi + 1e-12) {
        ticks.push(t);
      }
    }
  }
  if (ticks.length < 2) {
    ticks.length = 0;
    ticks.push(Number(Math.pow(10, logLo).toPrecision(3)));
    ticks.push(Number(Math.pow(10, logHi).toPrecision(3)));
  }
  scale.ticks = ticks;
  return scale;
}

function tickLabel(value: number): string {
  const e = Math.log10(value);
  if (Number.isInteger(e) && (e < -3 || e > 3)) {
    return `1e${e}`;
  }
  if (value >= 1) {
    return String(Number(value.toPrecision(6)));
  }
  return String(Number(value.toPrecision(2)));
}

function seriesLabel(s: Series): string {
  const style = s.dashed ? "dense" : "tensor";
  const slope = s.slope === null ? "" : ` (slope ${s.slope.toFixed(2)})`;
  return `${s.kind}/${s.dist} [${style}]${slope}`;
}

export function renderSvg(data: FigureData): string {
  const allX = data.series.flatMap((s) => s.x);
  const allY = data.series.flatMap((s) => s.y);
  const sx = logScale(allX, MARGIN.left, WIDTH - MARGIN.right);
  const sy = logScale(allY, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${MARGIN.left}" y="22" font-family="sans-serif" font-size="16">${esc(
      TITLES[data.figure] ?? data.figure
    )}</text>`
  );

  // frame
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`
  );

  for (const t of sx.ticks) {
    const x = sx(t);
    parts.push(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y1}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${y0 + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${tickLabel(
        t
      )}</text>`
    );
  }
  for (const t of sy.ticks) {
    const y = sy(t);
    parts.push(`<line x1="${x0}" y1="${fmt(y)}" x2="${x1}" y2="${fmt(y)}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${fmt(y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${tickLabel(
        t
      )}</text>`
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">${esc(
      data.xField
    )} (log)</text>`
  );
  parts.push(
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 ${
      (y0 + y1) / 2
    })">mean error ratio (log)</text>`
  );

  data.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x
      .map((x, j) => [x, s.y[j]] as const)
      .filter(([x, y]) => x > 0 && y > 0)
      .map(([x, y]) => `${fmt(sx(x))},${fmt(sy(y))}`);
    if (pts.length > 0) {
      const dash = s.dashed ? ' stroke-dasharray="7,5"' : "";
      parts.push(
        `<polyline fill="none" stroke="${color}" stroke-width="1.8"${dash} points="${pts.join(" ")}"/>`
      );
      for (const p of pts) {
        const [cx, cy] = p.split(",");
        parts.push(`<circle cx="${cx}" cy="${cy}" r="2.6" fill="${color}"/>`);
      }
    }
    const ly = MARGIN.top + 16 + i * 18;
    const lx = x1 + 14;
    const dash = s.dashed ? ' stroke-dasharray="7,5"' : "";
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"${dash}/>`
    );
    parts.push(
      `<text x="${lx + 32}" y="${ly}" font-family="sans-serif" font-size="11">${esc(
        seriesLabel(s)
      )}</text>`
    );
  });

  if (data.warning !== null) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" font-size="14" fill="#b00">warning: ${esc(
        data.warning
      )}</text>`
    );
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
