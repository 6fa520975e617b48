/**
 * Minimal deterministic SVG renderer: panels laid out in a row-major grid,
 * each with axes, ±1-standard-error bands, mean polylines, and a legend.
 * Output depends only on the figure data (numbers formatted with a fixed
 * precision), so identical inputs give identical bytes.
 */
import { FigureData, Panel, Series } from "./figures.js";

const PANEL_W = 360;
const PANEL_H = 280;
const MARGIN = { top: 44, right: 16, bottom: 48, left: 60 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return v.toFixed(3);
};

interface Scale {
  (v: number): number;
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

function dataRange(series: Series[], pick: (s: Series) => number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of pick(s)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (lo > hi) [lo, hi] = [0, 1];
  const pad = 0.04 * (hi - lo || 1);
  return [lo - pad, hi + pad];
}

function ticks(lo: number, hi: number, count: number): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderPanel(panel: Panel, ox: number, oy: number): string {
  const x0 = ox + MARGIN.left;
  const y0 = oy + MARGIN.top;
  const w = PANEL_W - MARGIN.left - MARGIN.right;
  const h = PANEL_H - MARGIN.top - MARGIN.bottom;
  const [xlo, xhi] = dataRange(panel.series, (s) => s.points.map((p) => p.x));
  const [ylo, yhi] = dataRange(panel.series, (s) =>
    s.points.flatMap((p) => [p.mean - p.stderr, p.mean + p.stderr]),
  );
  const sx = linearScale(xlo, xhi, x0, x0 + w);
  const sy = linearScale(ylo, yhi, y0 + h, y0);
  const parts: string[] = [];

  parts.push(
    `<text x="${fmt(ox + PANEL_W / 2)}" y="${fmt(oy + 18)}" text-anchor="middle" ` +
      `font-size="13" font-weight="bold">${escapeXml(panel.title)}</text>`,
  );
  parts.push(
    `<rect x="${fmt(x0)}" y="${fmt(y0)}" width="${fmt(w)}" height="${fmt(h)}" ` +
      `fill="none" stroke="#000" stroke-width="1"/>`,
  );
  for (const t of ticks(xlo, xhi, 4)) {
    parts.push(
      `<text x="${fmt(sx(t))}" y="${fmt(y0 + h + 16)}" text-anchor="middle" ` +
        `font-size="10">${t.toPrecision(3)}</text>`,
    );
  }
  for (const t of ticks(ylo, yhi, 4)) {
    parts.push(
      `<text x="${fmt(x0 - 6)}" y="${fmt(sy(t) + 3)}" text-anchor="end" ` +
        `font-size="10">${t.toPrecision(3)}</text>`,
    );
  }
  parts.push(
    `<text x="${fmt(x0 + w / 2)}" y="${fmt(y0 + h + 34)}" text-anchor="middle" ` +
      `font-size="11">${escapeXml(panel.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${fmt(ox + 14)}" y="${fmt(y0 + h / 2)}" text-anchor="middle" font-size="11" ` +
      `transform="rotate(-90 ${fmt(ox + 14)} ${fmt(y0 + h / 2)})">` +
      `${escapeXml(panel.yLabel)}</text>`,
  );

  panel.series.forEach((series, si) => {
    const color = COLORS[si % COLORS.length]!;
    if (series.points.length === 0) return;
    const upper = series.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean + p.stderr))}`);
    const lower = [...series.points]
      .reverse()
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean - p.stderr))}`);
    parts.push(
      `<polygon points="${[...upper, ...lower].join(" ")}" fill="${color}" ` +
        `fill-opacity="0.15" stroke="none"/>`,
    );
    const line = series.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean))}`).join(" ");
    parts.push(
      `<polyline points="${line}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
    for (const p of series.points) {
      parts.push(
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.mean))}" r="2.2" fill="${color}"/>`,
      );
    }
    const ly = y0 + 12 + 14 * si;
    parts.push(
      `<line x1="${fmt(x0 + w - 78)}" y1="${fmt(ly)}" x2="${fmt(x0 + w - 62)}" ` +
        `y2="${fmt(ly)}" stroke="${color}" stroke-width="1.5"/>`,
    );
    parts.push(
      `<text x="${fmt(x0 + w - 58)}" y="${fmt(ly + 3)}" font-size="10">` +
        `${escapeXml(series.label)}</text>`,
    );
  });
  return parts.join("\n");
}

export function renderSvg(figure: FigureData, columns = 2): string {
  const n = figure.panels.length;
  const cols = Math.min(columns, n);
  const rows = Math.ceil(n / cols);
  const width = cols * PANEL_W;
  const height = rows * PANEL_H + 24;
  const body = figure.panels
    .map((panel, i) =>
      renderPanel(panel, (i % cols) * PANEL_W, 24 + Math.floor(i / cols) * PANEL_H),
    )
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="#fff"/>\n` +
    `<text x="${fmt(width / 2)}" y="16" text-anchor="middle" font-size="14" ` +
    `font-weight="bold">${escapeXml(figure.title)}</text>\n` +
    `${body}\n</svg>\n`
  );
}
