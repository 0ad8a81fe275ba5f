/**
 * Accuracy-versus-K chart rendered as a plain SVG string.
 *
 * Pure geometry: the layout function maps report entries to pixel
 * coordinates and the renderer serializes them; rendered values are the
 * service's numbers verbatim.
 */

import type { EvaluationReport } from './api.js';

export interface ChartPoint {
  k: number;
  accuracy: number;
  x: number;
  y: number;
  chosen: boolean;
}

export interface ChartLayout {
  width: number;
  height: number;
  pad: number;
  points: ChartPoint[];
  yMin: number;
  yMax: number;
}

export function chartLayout(
  report: EvaluationReport,
  width = 460,
  height = 220,
  pad = 36,
): ChartLayout {
  const entries = report.entries;
  const accuracies = entries.map((e) => e.accuracy);
  let yMin = Math.min(...accuracies);
  let yMax = Math.max(...accuracies);
  if (yMax === yMin) {
    // flat or single-point series: give the band one unit of headroom
    yMin -= 1;
    yMax += 1;
  }
  const ks = entries.map((e) => e.k);
  const kMin = Math.min(...ks);
  const kMax = Math.max(...ks);
  const spanX = width - 2 * pad;
  const spanY = height - 2 * pad;

  const points = entries.map((entry) => {
    const fx = kMax === kMin ? 0.5 : (entry.k - kMin) / (kMax - kMin);
    const fy = (entry.accuracy - yMin) / (yMax - yMin);
    return {
      k: entry.k,
      accuracy: entry.accuracy,
      x: pad + fx * spanX,
      y: height - pad - fy * spanY,
      chosen: entry.k === report.chosen_k,
    };
  });
  return { width, height, pad, points, yMin, yMax };
}

export function renderChartSvg(report: EvaluationReport): string {
  const layout = chartLayout(report);
  const { width, height, pad, points } = layout;
  const path = points.map((p, i) => `${i === 0 ? 'M' : 'L'}${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(' ');
  const dots = points
    .map((p) => {
      const cls = p.chosen ? 'chart-dot chosen' : 'chart-dot';
      const radius = p.chosen ? 6 : 4;
      return (
        `<circle class="${cls}" data-k="${p.k}" data-accuracy="${p.accuracy}" ` +
        `cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="${radius}">` +
        `<title>K=${p.k}: ${p.accuracy}%</title></circle>`
      );
    })
    .join('');
  const labels = points
    .map((p) => `<text class="chart-label" x="${p.x.toFixed(1)}" y="${height - pad + 16}">${p.k}</text>`)
    .join('');
  const axis =
    `<line class="chart-axis" x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}"/>` +
    `<line class="chart-axis" x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}"/>`;
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img" aria-label="accuracy versus K">` +
    `${axis}<path class="chart-line" d="${path}"/>${dots}${labels}</svg>`
  );
}
