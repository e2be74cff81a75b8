// Dependency-free SVG charts rendered as strings: a line chart for the
// budget-iteration trace and efficiency curves, a cell heatmap for
// two-axis sensitivity grids.

export interface Point {
  x: number;
  y: number;
}

export interface LineChartOptions {
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
}

const PAD = { left: 58, right: 14, top: 12, bottom: 34 };

function scale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

function fmtTick(v: number): string {
  if (Math.abs(v) >= 10000) return v.toExponential(1);
  return Number(v.toPrecision(3)).toString();
}

export function lineChart(points: Point[], opts: LineChartOptions = {}): string {
  const w = opts.width ?? 560;
  const h = opts.height ?? 240;
  if (points.length === 0) {
    return `<svg width="${w}" height="${h}" role="img"></svg>`;
  }
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const sx = scale([Math.min(...xs), Math.max(...xs)], [PAD.left, w - PAD.right]);
  const sy = scale([Math.min(...ys), Math.max(...ys)], [h - PAD.bottom, PAD.top]);
  const path = points
    .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p.x).toFixed(1)},${sy(p.y).toFixed(1)}`)
    .join(" ");
  const dots = points
    .map((p) => `<circle cx="${sx(p.x).toFixed(1)}" cy="${sy(p.y).toFixed(1)}" r="3" fill="#1f6f8b"/>`)
    .join("");
  const xTicks = [Math.min(...xs), Math.max(...xs)];
  const yTicks = [Math.min(...ys), Math.max(...ys)];
  const axis = `
    <line x1="${PAD.left}" y1="${h - PAD.bottom}" x2="${w - PAD.right}" y2="${h - PAD.bottom}" stroke="#888"/>
    <line x1="${PAD.left}" y1="${PAD.top}" x2="${PAD.left}" y2="${h - PAD.bottom}" stroke="#888"/>
    ${xTicks.map((t) => `<text x="${sx(t).toFixed(1)}" y="${h - PAD.bottom + 16}" font-size="11" text-anchor="middle">${fmtTick(t)}</text>`).join("")}
    ${yTicks.map((t) => `<text x="${PAD.left - 6}" y="${(sy(t) + 4).toFixed(1)}" font-size="11" text-anchor="end">${fmtTick(t)}</text>`).join("")}
    ${opts.xLabel ? `<text x="${(PAD.left + w - PAD.right) / 2}" y="${h - 6}" font-size="11" text-anchor="middle">${opts.xLabel}</text>` : ""}
    ${opts.yLabel ? `<text x="12" y="${(PAD.top + h - PAD.bottom) / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 12 ${(PAD.top + h - PAD.bottom) / 2})">${opts.yLabel}</text>` : ""}`;
  return `<svg width="${w}" height="${h}" role="img" xmlns="http://www.w3.org/2000/svg">
  ${axis}
  <path d="${path}" fill="none" stroke="#1f6f8b" stroke-width="1.8"/>
  ${dots}
</svg>`;
}

export interface HeatmapOptions {
  width?: number;
  cellHeight?: number;
  rowLabels: string[];
  colLabels: string[];
  valueLabel?: string;
}

/** values[row][col]; colors interpolate white (min) to deep teal (max). */
export function heatmap(values: number[][], opts: HeatmapOptions): string {
  const rows = values.length;
  const cols = rows > 0 ? values[0].length : 0;
  const w = opts.width ?? 560;
  const ch = opts.cellHeight ?? 30;
  const left = 90;
  const top = 26;
  const cw = cols > 0 ? (w - left - 10) / cols : 0;
  const flat = values.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const span = hi - lo || 1;
  const color = (v: number) => {
    const t = (v - lo) / span;
    const mix = (a: number, b: number) => Math.round(a + (b - a) * t);
    return `rgb(${mix(255, 31)},${mix(255, 111)},${mix(255, 139)})`;
  };
  let cells = "";
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const v = values[r][c];
      const x = left + c * cw;
      const y = top + r * ch;
      const textColor = (v - lo) / span > 0.6 ? "#fff" : "#222";
      cells += `<rect x="${x}" y="${y}" width="${cw}" height="${ch}" fill="${color(v)}" stroke="#fff"/>`;
      cells += `<text x="${x + cw / 2}" y="${y + ch / 2 + 4}" font-size="11" text-anchor="middle" fill="${textColor}">${Number(v.toPrecision(4))}</text>`;
    }
  }
  const rowText = opts.rowLabels
    .map((l, r) => `<text x="${left - 6}" y="${top + r * ch + ch / 2 + 4}" font-size="11" text-anchor="end">${l}</text>`)
    .join("");
  const colText = opts.colLabels
    .map((l, c) => `<text x="${left + c * cw + cw / 2}" y="${top - 8}" font-size="11" text-anchor="middle">${l}</text>`)
    .join("");
  const h = top + rows * ch + 12;
  return `<svg width="${w}" height="${h}" role="img" xmlns="http://www.w3.org/2000/svg">${colText}${rowText}${cells}</svg>`;
}
