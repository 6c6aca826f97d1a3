/**
 * Deterministic SVG chart: failure probability versus budget on a log
 * y-axis. Measured curves are solid, bound curves dashed; points that
 * cannot sit on a log axis (pe = 0) are omitted, as are vacuous bounds,
 * so a dashed curve simply starts at its first defined budget.
 */

import type { CurvePoint, CurveSet } from "./curves.js";

export interface SeriesGeometry {
  strategy: string;
  kind: "measured" | "bound";
  points: Array<{ T: number; value: number }>;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  title?: string;
}

const NAMED_COLORS: Record<string, string> = {
  spread: "#1f77b4",
  "chernoff-closed-form": "#ff7f0e",
  hoeffding: "#2ca02c",
  "chernoff-iterative": "#d62728",
};
const FALLBACK_PALETTE = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

export function seriesColor(strategy: string, index: number): string {
  return NAMED_COLORS[strategy] ?? (FALLBACK_PALETTE[index % FALLBACK_PALETTE.length] as string);
}

/** Per-strategy measured and bound series, keeping only log-plottable points. */
export function chartSeries(curves: CurveSet): SeriesGeometry[] {
  const series: SeriesGeometry[] = [];
  for (const strategy of curves.strategies) {
    const pts = curves.points.get(strategy) as CurvePoint[];
    const measured = pts
      .filter((p) => p.pe > 0)
      .map((p) => ({ T: p.T, value: p.pe }));
    if (measured.length > 0) {
      series.push({ strategy, kind: "measured", points: measured });
    }
    const bound = pts
      .filter((p) => p.bound !== null && p.bound > 0)
      .map((p) => ({ T: p.T, value: p.bound as number }));
    if (bound.length > 0) {
      series.push({ strategy, kind: "bound", points: bound });
    }
  }
  if (series.length === 0) {
    throw new Error("nothing to draw: no positive values in any aggregate row");
  }
  return series;
}

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderSvg(curves: CurveSet, options: ChartOptions = {}): string {
  const width = options.width ?? 760;
  const height = options.height ?? 520;
  const title = options.title ?? "failure probability vs storage budget";
  const margin = { top: 44, right: 24, bottom: 52, left: 74 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const series = chartSeries(curves);
  const values = series.flatMap((s) => s.points.map((p) => p.value));
  const budgets = series.flatMap((s) => s.points.map((p) => p.T));

  let decadeLo = Math.floor(Math.log10(Math.min(...values)));
  let decadeHi = Math.ceil(Math.log10(Math.max(...values)));
  if (decadeLo === decadeHi) {
    decadeLo -= 1;
    decadeHi += 1;
  }
  const tMin = Math.min(...budgets);
  const tMax = Math.max(...budgets);
  const tPad = tMax > tMin ? 0.03 * (tMax - tMin) : 0.5;

  const x = (t: number): number =>
    margin.left + ((t - (tMin - tPad)) / (tMax + tPad - (tMin - tPad))) * plotW;
  const y = (v: number): number =>
    margin.top + ((decadeHi - Math.log10(v)) / (decadeHi - decadeLo)) * plotH;
  const fmt = (v: number): string => v.toFixed(2);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="15">${esc(title)}</text>`,
  );

  // y gridlines and decade labels (log scale)
  for (let d = decadeLo; d <= decadeHi; d++) {
    const yy = fmt(y(10 ** d));
    parts.push(
      `<line class="grid" x1="${fmt(margin.left)}" y1="${yy}" ` +
        `x2="${fmt(margin.left + plotW)}" y2="${yy}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(margin.left - 8)}" y="${yy}" text-anchor="end" ` +
        `dominant-baseline="middle" font-size="11">1e${d}</text>`,
    );
  }
  // x ticks at the observed budgets
  const uniqueT = [...new Set(budgets)].sort((a, b) => a - b);
  for (const t of uniqueT) {
    const xx = fmt(x(t));
    parts.push(
      `<line x1="${xx}" y1="${fmt(margin.top + plotH)}" x2="${xx}" ` +
        `y2="${fmt(margin.top + plotH + 5)}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${xx}" y="${fmt(margin.top + plotH + 18)}" text-anchor="middle" ` +
        `font-size="11">${String(t)}</text>`,
    );
  }
  // axes
  parts.push(
    `<rect x="${fmt(margin.left)}" y="${fmt(margin.top)}" width="${fmt(plotW)}" ` +
      `height="${fmt(plotH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt(margin.left + plotW / 2)}" y="${fmt(height - 14)}" ` +
      `text-anchor="middle" font-size="12">storage budget T</text>`,
  );
  parts.push(
    `<text x="20" y="${fmt(margin.top + plotH / 2)}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 20 ${fmt(margin.top + plotH / 2)})">failure probability</text>`,
  );

  // series
  for (const s of series) {
    const color = seriesColor(s.strategy, curves.strategies.indexOf(s.strategy));
    const dash = s.kind === "bound" ? ' stroke-dasharray="6 4"' : "";
    const coords = s.points.map((p) => `${fmt(x(p.T))},${fmt(y(p.value))}`).join(" ");
    parts.push(
      `<polyline class="series ${s.kind}" data-strategy="${esc(s.strategy)}" ` +
        `points="${coords}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
    );
    for (const p of s.points) {
      parts.push(
        `<circle class="marker ${s.kind}" cx="${fmt(x(p.T))}" cy="${fmt(y(p.value))}" ` +
          `r="2.4" fill="${color}"/>`,
      );
    }
  }

  // legend: strategies by color, line styles by kind
  const legendX = margin.left + plotW - 218;
  let legendY = margin.top + 10;
  parts.push(
    `<rect x="${fmt(legendX - 8)}" y="${fmt(legendY - 4)}" width="226" ` +
      `height="${18 * (curves.strategies.length + 2) + 8}" fill="white" ` +
      `fill-opacity="0.85" stroke="#cccccc"/>`,
  );
  for (const [i, strategy] of curves.strategies.entries()) {
    const yy = legendY + 10 + 18 * i;
    parts.push(
      `<line x1="${fmt(legendX)}" y1="${yy}" x2="${fmt(legendX + 26)}" y2="${yy}" ` +
        `stroke="${seriesColor(strategy, i)}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${fmt(legendX + 32)}" y="${yy + 4}" font-size="11">${esc(strategy)}</text>`,
    );
  }
  const styleY = legendY + 10 + 18 * curves.strategies.length;
  parts.push(
    `<line x1="${fmt(legendX)}" y1="${styleY}" x2="${fmt(legendX + 26)}" y2="${styleY}" ` +
      `stroke="#666666" stroke-width="2"/>`,
    `<text x="${fmt(legendX + 32)}" y="${styleY + 4}" font-size="11">measured (solid)</text>`,
    `<line x1="${fmt(legendX)}" y1="${styleY + 18}" x2="${fmt(legendX + 26)}" ` +
      `y2="${styleY + 18}" stroke="#666666" stroke-width="2" stroke-dasharray="6 4"/>`,
    `<text x="${fmt(legendX + 32)}" y="${styleY + 22}" font-size="11">bound (dashed)</text>`,
  );

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
