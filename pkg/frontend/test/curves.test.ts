import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { EXPECTED_HEADER, parseResultsCsv } from "../src/csv";
import { extractCurves } from "../src/curves";

const fixture = (name: string): string =>
  readFileSync(fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url)), "utf-8");

const STRATEGIES = ["spread", "chernoff-closed-form", "hoeffding", "chernoff-iterative"];

describe("extractCurves", () => {
  it("collects one ascending curve per strategy from aggregates only", () => {
    const curves = extractCurves(parseResultsCsv(fixture("sweep.csv")));
    expect(curves.strategies).toEqual(STRATEGIES);
    for (const strategy of STRATEGIES) {
      const pts = curves.points.get(strategy)!;
      expect(pts).toHaveLength(7);
      for (let i = 1; i < pts.length; i++) {
        expect(pts[i]!.T).toBeGreaterThan(pts[i - 1]!.T);
      }
    }
  });

  it("leaves missing bounds out instead of zero-filling", () => {
    const curves = extractCurves(parseResultsCsv(fixture("vacuous.csv")));
    const spread = curves.points.get("spread")!;
    expect(spread.map((p) => p.bound === null)).toEqual([true, true, false, false]);
    expect(spread.every((p) => p.bound === null || p.bound > 0)).toBe(true);
  });

  it("is a pure function of the CSV text", () => {
    const a = extractCurves(parseResultsCsv(fixture("sweep.csv")));
    const b = extractCurves(parseResultsCsv(fixture("sweep.csv")));
    expect(a.strategies).toEqual(b.strategies);
    for (const s of a.strategies) {
      expect(a.points.get(s)).toEqual(b.points.get(s));
    }
  });

  it("fails on a CSV with no aggregate block", () => {
    const text = `${EXPECTED_HEADER}\n0,spread,1.5,0.25,0.0,0.5,,\n`;
    expect(() => extractCurves(parseResultsCsv(text))).toThrow(/no aggregate/);
  });

  it("fails on non-ascending budgets within a strategy", () => {
    const text =
      `${EXPECTED_HEADER}\n` +
      "mean,spread,2.0,0.25,0.0,0.5,,\n" +
      "mean,spread,1.5,0.30,0.0,0.6,,\n";
    expect(() => extractCurves(parseResultsCsv(text))).toThrow(/strictly ascending/);
  });
});
