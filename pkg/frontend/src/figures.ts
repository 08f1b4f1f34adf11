/** The five figure kinds, each a pure function from parsed inputs to a Figure. */

import { Figure, Scale, formatTick } from "./canvas";
import { Table, numericColumn, stringColumn } from "./csv";

export const WIDTH = 640;
export const HEIGHT = 480;
const MARGIN = { left: 78, right: 24, top: 42, bottom: 56 };
export const LINE_WIDTH = 2;

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

interface Frame {
  fig: Figure;
  x: Scale;
  y: Scale;
}

function axes(title: string, xLabel: string, yLabel: string,
              xLo: number, xHi: number, yLo: number, yHi: number,
              yTickText?: (v: number) => string): Frame {
  const fig = new Figure(WIDTH, HEIGHT);
  const x = new Scale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right);
  const y = new Scale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);
  fig.text(WIDTH / 2, 24, title, 12, "#000000", "middle");
  fig.line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, "#000000", 1);
  fig.line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right,
           HEIGHT - MARGIN.bottom, "#000000", 1);
  for (const tick of x.ticks()) {
    const px = x.at(tick);
    fig.line(px, HEIGHT - MARGIN.bottom, px, HEIGHT - MARGIN.bottom + 5, "#000000", 1);
    fig.text(px, HEIGHT - MARGIN.bottom + 18, formatTick(tick), 8, "#000000", "middle");
  }
  for (const tick of y.ticks()) {
    const py = y.at(tick);
    fig.line(MARGIN.left - 5, py, MARGIN.left, py, "#000000", 1);
    fig.text(MARGIN.left - 8, py + 3, (yTickText ?? formatTick)(tick), 8, "#000000", "end");
  }
  fig.text(WIDTH / 2, HEIGHT - 14, xLabel, 10, "#000000", "middle");
  fig.text(16, MARGIN.top - 12, yLabel, 10, "#000000", "start");
  return { fig, x, y };
}

function span(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  return [lo, hi];
}

// ---------------------------------------------------------------------------

export function trajectoryFigure(trace: Table): Figure {
  const ids = stringColumn(trace, "trajectory");
  const time = numericColumn(trace, "time");
  const m = numericColumn(trace, "m0");
  const [tLo, tHi] = span(time);
  const [mLo, mHi] = span(m);
  const pad = 0.05 * (mHi - mLo);
  const frame = axes("COLLAPSE TRAJECTORIES", "TIME (S)", "<M>",
                     tLo, tHi, mLo - pad, mHi + pad);
  const grouped = new Map<string, Array<[number, number]>>();
  ids.forEach((id, n) => {
    if (!grouped.has(id)) grouped.set(id, []);
    grouped.get(id)!.push([frame.x.at(time[n]), frame.y.at(m[n])]);
  });
  let colorIndex = 0;
  for (const [id, points] of grouped) {
    const color = PALETTE[colorIndex % PALETTE.length];
    frame.fig.polyline(points, color, LINE_WIDTH);
    frame.fig.text(WIDTH - MARGIN.right - 6, MARGIN.top + 14 + 14 * colorIndex,
                   `TRAJ ${id}`, 8, color, "end");
    colorIndex += 1;
  }
  return frame.fig;
}

export interface CollapseSummary {
  frequencies: Record<string, number>;
  born_probabilities: Record<string, number>;
}

export function histogramFigure(summary: CollapseSummary): Figure {
  const outcomes = Object.keys(summary.born_probabilities).sort();
  if (outcomes.length === 0) {
    throw new Error("summary is missing column 'born_probabilities'");
  }
  if (!summary.frequencies) {
    throw new Error("summary is missing column 'frequencies'");
  }
  const frame = axes("OUTCOME FREQUENCIES VS BORN WEIGHTS", "OUTCOME", "PROBABILITY",
                     -0.5, outcomes.length - 0.5, 0, 1);
  const barHalf = 0.3;
  outcomes.forEach((key, n) => {
    const freq = summary.frequencies[key] ?? 0;
    const x0 = frame.x.at(n - barHalf);
    const x1 = frame.x.at(n + barHalf);
    const yTop = frame.y.at(freq);
    frame.fig.rect(x0, yTop, x1 - x0, frame.y.at(0) - yTop, "#9fc5e8");
    const born = summary.born_probabilities[key];
    const yBorn = frame.y.at(born);
    frame.fig.line(x0 - 4, yBorn, x1 + 4, yBorn, "#d62728", LINE_WIDTH);
    frame.fig.circle(frame.x.at(n), yBorn, 4, "#d62728");
    frame.fig.text(frame.x.at(n), frame.y.at(0) + 30, key, 9, "#000000", "middle");
  });
  frame.fig.text(WIDTH - MARGIN.right - 6, MARGIN.top + 14, "BARS: OBSERVED", 8,
                 "#1f77b4", "end");
  frame.fig.text(WIDTH - MARGIN.right - 6, MARGIN.top + 28, "MARKS: BORN", 8,
                 "#d62728", "end");
  return frame.fig;
}

export function angularProfileFigure(profile: Table): Figure {
  const cos = numericColumn(profile, "cos_theta");
  const intensity = numericColumn(profile, "intensity");
  const frame = axes("ANGULAR COLLIMATION PROFILE", "COS THETA", "INTENSITY / PEAK",
                     -1, 1, 0, 1.05);
  const points = cos.map((c, n): [number, number] => [frame.x.at(c), frame.y.at(intensity[n])]);
  frame.fig.polyline(points, PALETTE[0], LINE_WIDTH);
  return frame.fig;
}

/** Closed-form overlay for the heating sweep: (1 + beta^2)^(-5/2). */
export function heatingOverlay(beta: number): number {
  return Math.pow(1.0 + beta * beta, -2.5);
}

export interface HeatingPoints {
  betas: number[];
  csvY: number[];     // pixel y of the swept values
  overlayY: number[]; // pixel y of the closed form at the same betas
  scale: Scale;
}

export function heatingCurvePoints(sweep: Table): HeatingPoints {
  const betas = numericColumn(sweep, "beta");
  const ratios = numericColumn(sweep, "lambda_ratio");
  const logs = ratios.map((r) => {
    if (r <= 0) throw new Error("column 'lambda_ratio' must be positive");
    return Math.log10(r);
  });
  const lo = Math.min(...logs, -0.5);
  const scale = new Scale(lo, 0.1, HEIGHT - MARGIN.bottom, MARGIN.top);
  const xScale = new Scale(Math.min(...betas), Math.max(...betas),
                           MARGIN.left, WIDTH - MARGIN.right);
  return {
    betas,
    csvY: logs.map((v) => scale.at(v)),
    overlayY: betas.map((b) => scale.at(Math.log10(heatingOverlay(b)))),
    scale,
  };
}

export function heatingCurveFigure(sweep: Table): Figure {
  const betas = numericColumn(sweep, "beta");
  const points = heatingCurvePoints(sweep);
  const frame = axes("BULK-HEATING COUPLING VS SPECTRAL CUTOFF",
                     "BETA = VS TC / RC", "LOG10 RATIO",
                     Math.min(...betas), Math.max(...betas),
                     points.scale.lo, points.scale.hi);
  // dense closed-form overlay line
  const dense: Array<[number, number]> = [];
  const bLo = Math.min(...betas);
  const bHi = Math.max(...betas);
  for (let n = 0; n <= 200; n++) {
    const b = bLo + ((bHi - bLo) * n) / 200;
    dense.push([frame.x.at(b), frame.y.at(Math.log10(heatingOverlay(b)))]);
  }
  frame.fig.polyline(dense, "#d62728", LINE_WIDTH);
  betas.forEach((b, n) => {
    frame.fig.circle(frame.x.at(b), points.csvY[n], 3, "#1f77b4");
  });
  frame.fig.text(WIDTH - MARGIN.right - 6, MARGIN.top + 14, "POINTS: SWEEP", 8,
                 "#1f77b4", "end");
  frame.fig.text(WIDTH - MARGIN.right - 6, MARGIN.top + 28, "LINE: CLOSED FORM", 8,
                 "#d62728", "end");
  return frame.fig;
}

export function frameTableFigure(pairs: Table): Figure {
  const index = stringColumn(pairs, "pair_index");
  const rest = stringColumn(pairs, "outcome_rest");
  const boosted = stringColumn(pairs, "outcome_boosted");
  const tRest = stringColumn(pairs, "collapse_time_rest");
  const tBoost = stringColumn(pairs, "collapse_time_boosted");
  const rows = Math.min(index.length, 24);
  const divergentTotal = index.reduce(
    (acc, _, n) => acc + (rest[n] !== boosted[n] ? 1 : 0), 0);

  const fig = new Figure(WIDTH, HEIGHT);
  fig.text(WIDTH / 2, 24, "FRAME COMPARISON: INDIVIDUAL OUTCOMES", 12, "#000000", "middle");
  fig.text(MARGIN.left, 48,
           `DIVERGENT PAIRS: ${divergentTotal} / ${index.length}`, 10, "#000000");
  const header = ["PAIR", "REST", "BOOSTED", "T REST", "T BOOST", ""];
  const colX = [MARGIN.left, 150, 230, 330, 440, 550];
  header.forEach((h, c) => fig.text(colX[c], 72, h, 9, "#000000"));
  fig.line(MARGIN.left, 78, WIDTH - MARGIN.right, 78, "#000000", 1);
  for (let n = 0; n < rows; n++) {
    const y = 96 + n * 15;
    const divergent = rest[n] !== boosted[n];
    const color = divergent ? "#d62728" : "#000000";
    const cells = [index[n], rest[n], boosted[n],
                   shortTime(tRest[n]), shortTime(tBoost[n]), divergent ? "*" : ""];
    cells.forEach((cell, c) => fig.text(colX[c], y, cell, 9, color));
  }
  if (index.length > rows) {
    fig.text(MARGIN.left, 96 + rows * 15, `(${index.length - rows} MORE ROWS)`, 9, "#555555");
  }
  return fig;
}

function shortTime(raw: string): string {
  if (raw === "") return "-";
  const value = Number(raw);
  return Number.isNaN(value) ? raw : value.toPrecision(4);
}
