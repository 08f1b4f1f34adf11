export { Figure, Scale, formatTick } from "./canvas";
export { parseCsv, numericColumn, stringColumn } from "./csv";
export {
  angularProfileFigure,
  frameTableFigure,
  heatingCurveFigure,
  heatingCurvePoints,
  heatingOverlay,
  histogramFigure,
  trajectoryFigure,
  LINE_WIDTH,
} from "./figures";
export { buildFigure, render } from "./render";
export { loadSpec, validateSpec, FIGURE_KINDS } from "./spec";
export type { FigureSpec, FigureKind, Style } from "./spec";
export { encodePng } from "./png";
