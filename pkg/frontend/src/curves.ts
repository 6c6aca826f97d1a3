/**
 * Aggregate-row extraction: one curve of (T, mean pe, mean bound) points
 * per strategy. Only `ensemble=mean` rows contribute; vacuous bounds stay
 * null and are never zero-filled.
 */

import type { ResultRow } from "./csv.js";

export interface CurvePoint {
  T: number;
  pe: number;
  bound: number | null;
}

export interface CurveSet {
  /** strategies in first-appearance order */
  strategies: string[];
  points: Map<string, CurvePoint[]>;
}

export function extractCurves(rows: ResultRow[]): CurveSet {
  const strategies: string[] = [];
  const points = new Map<string, CurvePoint[]>();
  for (const row of rows) {
    if (row.ensemble !== "mean") continue;
    if (row.pe === null) continue; // aggregate of error rows carries no data
    let list = points.get(row.strategy);
    if (list === undefined) {
      list = [];
      points.set(row.strategy, list);
      strategies.push(row.strategy);
    }
    list.push({ T: row.T, pe: row.pe, bound: row.bound });
  }
  if (strategies.length === 0) {
    throw new Error("no aggregate (ensemble=mean) rows in the CSV");
  }
  for (const strategy of strategies) {
    const list = points.get(strategy) as CurvePoint[];
    for (let i = 1; i < list.length; i++) {
      const prev = (list[i - 1] as CurvePoint).T;
      const here = (list[i] as CurvePoint).T;
      if (here <= prev) {
        throw new Error(
          `strategy ${strategy}: budgets must be strictly ascending (${prev} then ${here})`,
        );
      }
    }
  }
  return { strategies, points };
}
