/**
 * Grouped mean/standard-error series used by every figure.  The plotter does
 * no other aggregation or filtering, so means recomputed independently from
 * the CSV must coincide with what is drawn.
 */
import { Table } from "./csv.js";

export interface SeriesPoint {
  x: number;
  mean: number;
  stderr: number;
  n: number;
}

export interface Filter {
  column: string;
  equals: string;
}

function mean(values: number[]): number {
  let s = 0;
  for (const v of values) s += v;
  return s / values.length;
}

function stderr(values: number[], m: number): number {
  if (values.length < 2) return 0;
  let s = 0;
  for (const v of values) s += (v - m) * (v - m);
  return Math.sqrt(s / (values.length - 1) / values.length);
}

/**
 * Mean +/- standard error of `valueColumn`, grouped by the numeric
 * `xColumn`, over rows matching all filters; points sorted by x.
 */
export function meanSeries(
  table: Table,
  xColumn: string,
  valueColumn: string,
  filters: Filter[] = [],
): SeriesPoint[] {
  const groups = new Map<number, number[]>();
  outer: for (let r = 0; r < table.length; r++) {
    for (const f of filters) {
      if (table.str(r, f.column) !== f.equals) continue outer;
    }
    const x = table.num(r, xColumn);
    const bucket = groups.get(x);
    if (bucket === undefined) {
      groups.set(x, [table.num(r, valueColumn)]);
    } else {
      bucket.push(table.num(r, valueColumn));
    }
  }
  return [...groups.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([x, values]) => {
      const m = mean(values);
      return { x, mean: m, stderr: stderr(values, m), n: values.length };
    });
}

/**
 * Series where both axes are averaged per group (used by the
 * fidelity-vs-fidelity figure): groups by the integer `groupColumn` and
 * averages `xColumn` and `valueColumn` within each group.
 */
export function meanXYSeries(
  table: Table,
  groupColumn: string,
  xColumn: string,
  valueColumn: string,
  filters: Filter[] = [],
): SeriesPoint[] {
  const xs = new Map<number, number[]>();
  const ys = new Map<number, number[]>();
  outer: for (let r = 0; r < table.length; r++) {
    for (const f of filters) {
      if (table.str(r, f.column) !== f.equals) continue outer;
    }
    const g = table.num(r, groupColumn);
    if (!xs.has(g)) {
      xs.set(g, []);
      ys.set(g, []);
    }
    xs.get(g)!.push(table.num(r, xColumn));
    ys.get(g)!.push(table.num(r, valueColumn));
  }
  return [...xs.keys()]
    .sort((a, b) => a - b)
    .map((g) => {
      const yv = ys.get(g)!;
      const m = mean(yv);
      return { x: mean(xs.get(g)!), mean: m, stderr: stderr(yv, m), n: yv.length };
    });
}

/** Distinct values of a string column in first-appearance order. */
export function distinct(table: Table, column: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (let r = 0; r < table.length; r++) {
    const v = table.str(r, column);
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
