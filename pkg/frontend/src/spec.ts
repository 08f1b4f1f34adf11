/** Figure specification: a JSON document naming inputs, kind, output, style. */

import * as fs from "node:fs";
import * as path from "node:path";

export const FIGURE_KINDS = [
  "trajectory",
  "histogram",
  "angular_profile",
  "heating_curve",
  "frame_table",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Style {
  dpi: number;
  format: "png" | "svg";
}

export interface FigureSpec {
  inputFiles: string[];
  figureKind: FigureKind;
  outputPath: string;
  style: Style;
}

export function loadSpec(specPath: string): FigureSpec {
  const raw = JSON.parse(fs.readFileSync(specPath, "utf-8"));
  const baseDir = path.dirname(path.resolve(specPath));
  return validateSpec(raw, baseDir);
}

export function validateSpec(raw: unknown, baseDir: string): FigureSpec {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("figure spec must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  const known = new Set(["input_files", "figure_kind", "output_path", "style"]);
  for (const key of Object.keys(doc)) {
    if (!known.has(key)) {
      throw new Error(`unknown figure-spec key '${key}'`);
    }
  }
  const inputs = doc.input_files;
  if (!Array.isArray(inputs) || inputs.length === 0 || !inputs.every((p) => typeof p === "string")) {
    throw new Error("'input_files' must be a non-empty list of paths");
  }
  const kind = doc.figure_kind;
  if (typeof kind !== "string" || !FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new Error(`'figure_kind' must be one of ${FIGURE_KINDS.join(", ")}`);
  }
  const output = doc.output_path;
  if (typeof output !== "string" || output.length === 0) {
    throw new Error("'output_path' must be a path");
  }
  const styleRaw = (doc.style ?? {}) as Record<string, unknown>;
  const dpi = styleRaw.dpi ?? 96;
  const format = styleRaw.format ?? inferFormat(output);
  if (typeof dpi !== "number" || dpi <= 0) {
    throw new Error("'style.dpi' must be a positive number");
  }
  if (format !== "png" && format !== "svg") {
    throw new Error("'style.format' must be 'png' or 'svg'");
  }
  return {
    inputFiles: inputs.map((p) => path.resolve(baseDir, p)),
    figureKind: kind as FigureKind,
    outputPath: path.resolve(baseDir, output),
    style: { dpi, format },
  };
}

function inferFormat(outputPath: string): string {
  return outputPath.toLowerCase().endsWith(".png") ? "png" : "svg";
}
