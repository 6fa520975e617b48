/**
 * Figure CSV schemas: each figure kind requires a matching 'schema_kind'
 * metadata entry and a fixed set of columns.  Inputs that do not match are
 * rejected before any rendering happens.
 */
import { Table } from "./csv.js";

export type FigureKind = "fig1" | "fig2" | "fig3";

export class SchemaMismatchError extends Error {}

const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  fig1: ["ordering", "trial", "k", "fidelity", "converged", "iterations"],
  fig2: [
    "kind",
    "trial",
    "point",
    "param",
    "f_target_applied",
    "estimator",
    "f_est_applied",
    "converged",
    "iterations",
  ],
  fig3: [
    "kind",
    "band",
    "trial",
    "estimator",
    "k",
    "f_target_applied",
    "f_est_applied",
    "f_est_target",
    "converged",
    "iterations",
  ],
};

export function validateSchema(table: Table, kind: FigureKind): void {
  const declared = table.meta["schema_kind"];
  if (declared !== kind) {
    throw new SchemaMismatchError(
      `CSV declares schema_kind '${declared ?? "<none>"}', expected '${kind}'`,
    );
  }
  for (const column of REQUIRED_COLUMNS[kind]) {
    if (!table.csv.columns.includes(column)) {
      throw new SchemaMismatchError(`schema '${kind}' requires column '${column}'`);
    }
  }
}
