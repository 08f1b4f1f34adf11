/** Minimal CSV reader for the machine-generated artifact files.
 *
 * The producer never quotes or escapes fields, so splitting on commas is
 * exact; empty cells stay empty strings.
 */

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV document");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new Error(
        `CSV row has ${row.length} fields, expected ${columns.length}`,
      );
    }
  }
  return { columns, rows };
}

/** Numeric column accessor; names the column when it is absent or non-numeric. */
export function numericColumn(table: Table, name: string): number[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new Error(`input is missing column '${name}'`);
  }
  return table.rows.map((row, n) => {
    const value = Number(row[index]);
    if (row[index] === "" || Number.isNaN(value)) {
      throw new Error(`column '${name}' row ${n} is not numeric: '${row[index]}'`);
    }
    return value;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new Error(`input is missing column '${name}'`);
  }
  return table.rows.map((row) => row[index]);
}
