/** Spec-driven rendering: load inputs, build the figure, write the file. */

import * as fs from "node:fs";
import * as path from "node:path";

import { Figure } from "./canvas";
import { parseCsv } from "./csv";
import {
  CollapseSummary,
  angularProfileFigure,
  frameTableFigure,
  heatingCurveFigure,
  histogramFigure,
  trajectoryFigure,
} from "./figures";
import { FigureSpec } from "./spec";

export function buildFigure(spec: FigureSpec): Figure {
  const first = fs.readFileSync(spec.inputFiles[0], "utf-8");
  switch (spec.figureKind) {
    case "trajectory":
      return trajectoryFigure(parseCsv(first));
    case "histogram":
      return histogramFigure(JSON.parse(first) as CollapseSummary);
    case "angular_profile":
      return angularProfileFigure(parseCsv(first));
    case "heating_curve":
      return heatingCurveFigure(parseCsv(first));
    case "frame_table":
      return frameTableFigure(parseCsv(first));
  }
}

export function render(spec: FigureSpec): string {
  const figure = buildFigure(spec);
  fs.mkdirSync(path.dirname(spec.outputPath), { recursive: true });
  if (spec.style.format === "svg") {
    fs.writeFileSync(spec.outputPath, figure.toSvg(spec.style.dpi));
  } else {
    fs.writeFileSync(spec.outputPath, figure.toPng(spec.style.dpi));
  }
  return spec.outputPath;
}
