/**
 * Parser for the sweep CSV written by the storalloc harness.
 *
 * The schema is fixed and quote-free: `ensemble,strategy,T,pe,pe_hw,bound,diag,ms`.
 * Empty numeric cells mean "absent" (vacuous bound, unrecorded timing) and
 * parse to null. Any malformed row fails hard with its 1-based line number.
 */

export const EXPECTED_HEADER = "ensemble,strategy,T,pe,pe_hw,bound,diag,ms";

export interface ResultRow {
  /** ensemble index as written, or "mean" for aggregate rows */
  ensemble: string;
  strategy: string;
  T: number;
  pe: number | null;
  peHalfWidth: number | null;
  bound: number | null;
  diag: string;
  ms: string;
}

function requiredNumber(field: string, name: string, line: number): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new Error(`row ${line}: field ${name} is not a finite number: ${JSON.stringify(field)}`);
  }
  return value;
}

function optionalNumber(field: string, name: string, line: number): number | null {
  if (field === "") return null;
  return requiredNumber(field, name, line);
}

export function parseResultsCsv(text: string): ResultRow[] {
  const lines = text.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop(); // trailing newline
  }
  if (lines.length === 0 || lines[0] !== EXPECTED_HEADER) {
    throw new Error(`row 1: expected header ${JSON.stringify(EXPECTED_HEADER)}`);
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = i + 1;
    const fields = (lines[i] as string).split(",");
    if (fields.length !== 8) {
      throw new Error(`row ${line}: expected 8 fields, got ${fields.length}`);
    }
    const [ensemble, strategy, t, pe, peHw, bound, diag, ms] = fields as [
      string, string, string, string, string, string, string, string,
    ];
    if (strategy === "") {
      throw new Error(`row ${line}: empty strategy name`);
    }
    rows.push({
      ensemble,
      strategy,
      T: requiredNumber(t, "T", line),
      pe: optionalNumber(pe, "pe", line),
      peHalfWidth: optionalNumber(peHw, "pe_hw", line),
      bound: optionalNumber(bound, "bound", line),
      diag,
      ms,
    });
  }
  return rows;
}
