import { readFileSync } from "fs";
import { basename } from "path";
import Papa from "papaparse";

import { CsvKind, DataError, Row, validate } from "./schemas";

export interface Dataset {
  file: string;
  /** Variant tag derived from the file name ("" for the base file). */
  label: string;
  rows: Row[];
}

/** metrics_impaired.csv -> "impaired"; metrics.csv -> "". */
export function variantLabel(file: string): string {
  const stem = basename(file).replace(/\.csv$/i, "");
  const underscore = stem.indexOf("_");
  return underscore < 0 ? "" : stem.slice(underscore + 1).replace(/_/g, " ");
}

export function loadCsv(file: string, kind: CsvKind): Dataset {
  const text = readFileSync(file, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new DataError(file, [
      {
        row: (first.row ?? 0) + 1,
        column: "(parse)",
        message: first.message,
      },
    ]);
  }
  const table = parsed.data;
  if (table.length === 0) {
    throw new DataError(file, [
      { row: 0, column: "(header)", message: "empty file" },
    ]);
  }
  const [header, ...records] = table;
  const rows = validate(file, header!, records, kind);
  return { file, label: variantLabel(file), rows };
}
