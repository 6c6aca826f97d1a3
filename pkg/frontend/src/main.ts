/**
 * CLI: `storalloc-render render <sweep.csv> -o <chart.svg>`
 */

import { readFileSync, writeFileSync } from "node:fs";

import { renderSvg } from "./chart.js";
import { parseResultsCsv } from "./csv.js";
import { extractCurves } from "./curves.js";

const USAGE = "usage: storalloc-render render <sweep.csv> -o <chart.svg>";

export function run(argv: string[]): number {
  if (argv[0] !== "render") {
    console.error(USAGE);
    return 2;
  }
  let csvPath: string | undefined;
  let outPath: string | undefined;
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i] as string;
    if (arg === "-o" || arg === "--out") {
      outPath = argv[++i];
    } else if (csvPath === undefined) {
      csvPath = arg;
    } else {
      console.error(USAGE);
      return 2;
    }
  }
  if (csvPath === undefined || outPath === undefined) {
    console.error(USAGE);
    return 2;
  }
  if (!outPath.endsWith(".svg")) {
    console.error("only .svg output is supported");
    return 2;
  }
  try {
    const text = readFileSync(csvPath, "utf-8");
    const curves = extractCurves(parseResultsCsv(text));
    writeFileSync(outPath, renderSvg(curves), "utf-8");
  } catch (err) {
    console.error(`render failed: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
  return 0;
}

// invoked directly (not imported by tests)
if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(run(process.argv.slice(2)));
}
