/**
 * Column schemas for the three simulator CSV kinds, plus a validator
 * that reports problems by row number and column name.
 */

export type CsvKind = "metrics" | "trajectory" | "regionmap";

export interface ColumnSpec {
  name: string;
  kind: "number" | "int" | "string";
  /** Extra constraint on an already-parsed value; returns a complaint or null. */
  check?: (value: number | string) => string | null;
  /** Numbers that may legitimately be "nan" (e.g. blocker absent). */
  allowNan?: boolean;
}

const probability = (v: number | string): string | null =>
  typeof v === "number" && (v < 0 || v > 1) ? "outside [0, 1]" : null;

const nonNegative = (v: number | string): string | null =>
  typeof v === "number" && v < 0 ? "negative" : null;

const zeroOrOne = (v: number | string): string | null =>
  v === 0 || v === 1 ? null : "must be 0 or 1";

export const SCHEMAS: Record<CsvKind, ColumnSpec[]> = {
  metrics: [
    { name: "sweep_name", kind: "string" },
    { name: "sweep_value", kind: "number" },
    { name: "scheme", kind: "string" },
    { name: "throughput_bps", kind: "number", check: nonNegative },
    { name: "outage_prob", kind: "number", check: probability },
    { name: "mean_se_bpshz", kind: "number", check: nonNegative },
    { name: "n_slots", kind: "int", check: nonNegative },
    { name: "ci_halfwidth_bps", kind: "number", check: nonNegative },
  ],
  trajectory: [
    { name: "slot", kind: "int", check: nonNegative },
    { name: "time_s", kind: "number", check: nonNegative },
    { name: "ue_x_m", kind: "number" },
    { name: "blocker_x_m", kind: "number", allowNan: true },
    { name: "direct_blocked", kind: "int", check: zeroOrOne },
    { name: "scheme", kind: "string" },
    { name: "path", kind: "string" },
    { name: "se_bpshz", kind: "number", check: nonNegative },
    { name: "rate_bps", kind: "number", check: nonNegative },
    { name: "outage", kind: "int", check: zeroOrOne },
  ],
  regionmap: [
    { name: "blocker_x_m", kind: "number" },
    { name: "ue_x_m", kind: "number" },
    { name: "candidate", kind: "string" },
    { name: "gain_db", kind: "number" },
  ],
};

export interface Issue {
  /** 1-based data row (first row after the header is 1); 0 for header issues. */
  row: number;
  column: string;
  message: string;
}

export class DataError extends Error {
  constructor(
    public readonly file: string,
    public readonly issues: Issue[],
  ) {
    super(
      `${file}: ${issues.length} problem(s); first: ` +
        `row ${issues[0]?.row}, column ${issues[0]?.column}: ${issues[0]?.message}`,
    );
  }

  report(): string {
    return this.issues
      .map((i) => `${this.file}: row ${i.row}: column ${i.column}: ${i.message}`)
      .join("\n");
  }
}

export type Row = Record<string, number | string>;

const MAX_ISSUES = 20;

/**
 * Check the header and coerce every cell against the schema.
 * Throws DataError with per-row, per-column issues on any mismatch.
 */
export function validate(
  file: string,
  header: string[],
  records: string[][],
  kind: CsvKind,
): Row[] {
  const spec = SCHEMAS[kind];
  const issues: Issue[] = [];

  const expected = spec.map((c) => c.name);
  const missing = expected.filter((name) => !header.includes(name));
  const extra = header.filter((name) => !expected.includes(name));
  for (const name of missing) {
    issues.push({ row: 0, column: name, message: "column missing from header" });
  }
  for (const name of extra) {
    issues.push({ row: 0, column: name, message: "unexpected column" });
  }
  if (issues.length > 0) throw new DataError(file, issues);

  const index = new Map(header.map((name, i) => [name, i]));
  const rows: Row[] = [];
  for (let r = 0; r < records.length; r++) {
    const record = records[r]!;
    if (record.length !== header.length) {
      issues.push({
        row: r + 1,
        column: header[record.length] ?? "(end)",
        message: `expected ${header.length} cells, got ${record.length}`,
      });
      if (issues.length >= MAX_ISSUES) break;
      continue;
    }
    const row: Row = {};
    for (const col of spec) {
      const raw = (record[index.get(col.name)!] ?? "").trim();
      let complaint: string | null = null;
      let value: number | string = raw;
      if (col.kind === "string") {
        if (raw === "") complaint = "empty string";
      } else {
        const parsed = raw === "nan" ? NaN : Number(raw);
        if (raw === "" || (raw !== "nan" && !Number.isFinite(parsed))) {
          complaint = `not a number: "${raw}"`;
        } else if (raw === "nan" && !col.allowNan) {
          complaint = "nan not allowed here";
        } else if (
          col.kind === "int" &&
          raw !== "nan" &&
          !Number.isInteger(parsed)
        ) {
          complaint = `not an integer: "${raw}"`;
        } else {
          value = parsed;
          complaint = col.check ? col.check(parsed) : null;
        }
      }
      if (complaint) {
        issues.push({ row: r + 1, column: col.name, message: complaint });
        if (issues.length >= MAX_ISSUES) break;
      } else {
        row[col.name] = value;
      }
    }
    if (issues.length >= MAX_ISSUES) break;
    rows.push(row);
  }

  if (issues.length > 0) throw new DataError(file, issues);
  return rows;
}
