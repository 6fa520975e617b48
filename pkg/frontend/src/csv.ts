/**
 * Reader for the experiment CSV format: '# key: value' metadata lines,
 * then a column-header line, then comma-separated data rows.
 */

export interface ExperimentCsv {
  meta: Record<string, string>;
  columns: string[];
  rows: string[][];
}

export class CsvFormatError extends Error {}

export function parseExperimentCsv(text: string): ExperimentCsv {
  const meta: Record<string, string> = {};
  const columns: string[] = [];
  const rows: string[][] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trimEnd();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const sep = body.indexOf(":");
      if (sep >= 0) {
        meta[body.slice(0, sep).trim()] = body.slice(sep + 1).trim();
      }
      continue;
    }
    if (columns.length === 0) {
      columns.push(...line.split(","));
      continue;
    }
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvFormatError(
        `row has ${cells.length} cells, expected ${columns.length}: ${line}`,
      );
    }
    rows.push(cells);
  }
  if (columns.length === 0 || rows.length === 0) {
    throw new CsvFormatError("CSV contains no data rows");
  }
  return { meta, columns, rows };
}

/** Column accessor that fails loudly on unknown names or non-numeric cells. */
export class Table {
  private readonly index: Map<string, number>;

  constructor(readonly csv: ExperimentCsv) {
    this.index = new Map(csv.columns.map((c, i) => [c, i]));
  }

  get meta(): Record<string, string> {
    return this.csv.meta;
  }

  get length(): number {
    return this.csv.rows.length;
  }

  col(name: string): number {
    const i = this.index.get(name);
    if (i === undefined) {
      throw new CsvFormatError(`missing column '${name}'`);
    }
    return i;
  }

  str(row: number, name: string): string {
    return this.csv.rows[row]![this.col(name)]!;
  }

  num(row: number, name: string): number {
    const cell = this.str(row, name);
    const v = Number(cell);
    if (!Number.isFinite(v)) {
      throw new CsvFormatError(`non-numeric cell '${cell}' in column '${name}'`);
    }
    return v;
  }
}
