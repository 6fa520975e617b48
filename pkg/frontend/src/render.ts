/**
 * Figure job runner: validate inputs, aggregate, render SVG, write the file.
 * Any validation or schema failure happens before the output file is touched.
 */
import { readFileSync, writeFileSync } from "node:fs";

import { parseExperimentCsv, Table } from "./csv.js";
import { buildFigure, FigureData } from "./figures.js";
import { FigureKind } from "./schema.js";
import { renderSvg } from "./svg.js";

export interface FigureJob {
  kind: FigureKind;
  inputs: string[];
  output: string;
  columns?: number;
}

export function loadTable(path: string): Table {
  return new Table(parseExperimentCsv(readFileSync(path, "utf-8")));
}

/** Build the figure data for a job without writing anything. */
export function buildJob(job: FigureJob): FigureData {
  if (job.inputs.length === 0) {
    throw new Error("figure job needs at least one input CSV");
  }
  return buildFigure(job.kind, job.inputs.map(loadTable));
}

export function render(job: FigureJob): FigureData {
  const figure = buildJob(job);
  const svg = renderSvg(figure, job.columns ?? 2);
  writeFileSync(job.output, svg);
  return figure;
}
