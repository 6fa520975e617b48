/**
 * Figure data builders: turn validated experiment tables into the exact
 * panel/series structure that the SVG renderer draws.  All aggregation lives
 * here (via stats.ts); the renderer only draws what these return.
 */
import { Table } from "./csv.js";
import { FigureKind, validateSchema } from "./schema.js";
import { distinct, meanSeries, meanXYSeries, SeriesPoint } from "./stats.js";

export interface Series {
  label: string;
  points: SeriesPoint[];
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export interface FigureData {
  kind: FigureKind;
  title: string;
  panels: Panel[];
}

/** Fidelity vs number of input states; one panel per input CSV (noise level),
 * one curve per probe ordering. */
export function buildFig1(tables: Table[]): FigureData {
  const panels = tables.map((table) => {
    validateSchema(table, "fig1");
    const sigma = table.meta["sigma"] ?? "?";
    return {
      title: `σ = ${sigma}`,
      xLabel: "number of input states k",
      yLabel: "fidelity with target map",
      series: distinct(table, "ordering").map((ordering) => ({
        label: ordering,
        points: meanSeries(table, "k", "fidelity", [
          { column: "ordering", equals: ordering },
        ]),
      })),
    };
  });
  return { kind: "fig1", title: "Estimate fidelity vs input states", panels };
}

/** Estimate-vs-applied fidelity; coherent and incoherent panels, one series
 * per estimator, sweep points averaged over trials on both axes. */
export function buildFig2(table: Table): FigureData {
  validateSchema(table, "fig2");
  const panels = distinct(table, "kind").map((errorKind) => ({
    title: `${errorKind} errors`,
    xLabel: "fidelity of applied map with target",
    yLabel: "fidelity of estimate with applied map",
    series: distinct(table, "estimator").map((estimator) => ({
      label: estimator,
      points: meanXYSeries(table, "point", "f_target_applied", "f_est_applied", [
        { column: "kind", equals: errorKind },
        { column: "estimator", equals: estimator },
      ]),
    })),
  }));
  return { kind: "fig2", title: "Estimator accuracy vs applied-map error", panels };
}

/** Grid of fidelity-vs-k curves: one panel per (error kind, band), one curve
 * per estimator. */
export function buildFig3(table: Table): FigureData {
  const panels: Panel[] = [];
  validateSchema(table, "fig3");
  for (const errorKind of distinct(table, "kind")) {
    for (const band of distinct(table, "band")) {
      panels.push({
        title: `${errorKind}, band ${band}`,
        xLabel: "number of input states k",
        yLabel: "fidelity with applied map",
        series: distinct(table, "estimator").map((estimator) => ({
          label: estimator,
          points: meanSeries(table, "k", "f_est_applied", [
            { column: "kind", equals: errorKind },
            { column: "band", equals: band },
            { column: "estimator", equals: estimator },
          ]),
        })),
      });
    }
  }
  return { kind: "fig3", title: "Estimator fidelity vs input states by error band", panels };
}

export function buildFigure(kind: FigureKind, tables: Table[]): FigureData {
  if (kind === "fig1") return buildFig1(tables);
  if (tables.length !== 1) {
    throw new Error(`${kind} takes exactly one input CSV, got ${tables.length}`);
  }
  return kind === "fig2" ? buildFig2(tables[0]!) : buildFig3(tables[0]!);
}
