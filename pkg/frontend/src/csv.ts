/**
 * Minimal typed CSV reader for the simulator's output tables.
 *
 * The producer writes UTF-8, a header row, comma separators and `.` decimals,
 * so a hand-rolled parser is enough; errors name the offending file/column.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, fileName: string): Table {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${fileName}: file is empty`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows = lines.slice(1).map((line) => line.split(","));
  if (rows.length === 0) {
    throw new Error(`${fileName}: no data rows`);
  }
  for (const [i, row] of rows.entries()) {
    if (row.length !== header.length) {
      throw new Error(
        `${fileName}: row ${i + 2} has ${row.length} fields, expected ${header.length}`,
      );
    }
  }
  return { header, rows };
}

/** Index of a required column, or an error naming it. */
export function columnIndex(table: Table, name: string, fileName: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${fileName}: missing column '${name}'`);
  }
  return idx;
}

export function numericColumn(table: Table, name: string, fileName: string): number[] {
  const idx = columnIndex(table, name, fileName);
  return table.rows.map((row, i) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new Error(
        `${fileName}: row ${i + 2}, column '${name}' is not numeric: '${row[idx]}'`,
      );
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string, fileName: string): string[] {
  const idx = columnIndex(table, name, fileName);
  return table.rows.map((row) => row[idx]);
}
