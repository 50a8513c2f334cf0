/**
 * Strict CSV reader for the simulator's artifacts: a mandatory header row,
 * comma separators, no quoting, numeric fields except where declared.
 */

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  /** column name -> values; numeric columns as numbers */
  columns: Record<string, (number | string)[]>;
  rows: number;
}

export function parseCsv(
  text: string,
  expectedHeader: string[],
  stringColumns: string[] = [],
): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0].split(",");
  if (
    header.length !== expectedHeader.length ||
    header.some((h, i) => h !== expectedHeader[i])
  ) {
    throw new SchemaError(
      `CSV header mismatch: expected "${expectedHeader.join(",")}", ` +
        `got "${lines[0]}"`,
    );
  }
  const stringSet = new Set(stringColumns);
  const columns: Record<string, (number | string)[]> = {};
  for (const h of header) columns[h] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(`row ${i} has ${parts.length} fields, ` +
        `expected ${header.length}`);
    }
    for (let c = 0; c < header.length; c++) {
      if (stringSet.has(header[c])) {
        columns[header[c]].push(parts[c]);
      } else {
        const v = Number(parts[c]);
        if (!Number.isFinite(v)) {
          throw new SchemaError(
            `row ${i}, column ${header[c]}: not a number: "${parts[c]}"`,
          );
        }
        columns[header[c]].push(v);
      }
    }
  }
  return { header, columns, rows: lines.length - 1 };
}

export function numbers(table: Table, column: string): number[] {
  return table.columns[column] as number[];
}
