/**
 * SVG line charts for piecewise-linear marginal value functions.
 *
 * The polyline joins exactly the (breakpoint, value) pairs from the report;
 * linear interpolation between them is what the model means, so no smoothing
 * is ever applied.
 */

export interface ChartOptions {
  width?: number;
  height?: number;
  pad?: number;
  yMax?: number | null;
}

const DEFAULTS = { width: 220, height: 140, pad: 24, yMax: null as number | null };

export function piecewiseChart(breakpoints: number[], values: number[],
                               label: string, opts: ChartOptions = {}): string {
  if (breakpoints.length !== values.length || breakpoints.length < 2) {
    throw new Error(`chart ${label}: need matching x/y arrays of length >= 2`);
  }
  const { width, height, pad } = { ...DEFAULTS, ...opts };
  const yTop = opts.yMax ?? Math.max(...values, 1e-9);
  const x0 = breakpoints[0];
  const x1 = breakpoints[breakpoints.length - 1];
  const sx = (x: number) => pad + ((x - x0) / (x1 - x0)) * (width - 2 * pad);
  const sy = (y: number) => height - pad - (y / yTop) * (height - 2 * pad);
  const pts = breakpoints
    .map((x, i) => `${sx(x).toFixed(2)},${sy(values[i]).toFixed(2)}`)
    .join(" ");
  const dots = breakpoints
    .map((x, i) => `<circle cx="${sx(x).toFixed(2)}" cy="${sy(values[i]).toFixed(2)}" r="2.5" />`)
    .join("");
  return [
    `<svg class="vf-chart" viewBox="0 0 ${width} ${height}" role="img" aria-label="${label}">`,
    `<line class="axis" x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}" />`,
    `<line class="axis" x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" />`,
    `<polyline fill="none" points="${pts}" />`,
    dots,
    `<text class="chart-label" x="${width / 2}" y="${height - 4}" text-anchor="middle">${label}</text>`,
    `</svg>`,
  ].join("");
}

/** Horizontal relevance strip: one cell per criterion, shaded by count. */
export function relevanceStrip(relevance: Record<string, number>,
                               criteria: string[], total: number): string {
  const cells = criteria.map((cid) => {
    const r = relevance[cid] ?? 0;
    const share = total > 0 ? r / total : 0;
    const alpha = (0.12 + 0.88 * share).toFixed(3);
    return `<div class="strip-cell" data-criterion="${cid}" ` +
      `style="background: rgba(31, 119, 78, ${alpha})" ` +
      `title="${cid}: ${r}/${total}">${cid}<span>${r}</span></div>`;
  });
  return `<div class="relevance-strip">${cells.join("")}</div>`;
}
