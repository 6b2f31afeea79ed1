/** Chart state and rendering.
 *
 * Chart data building is pure: feeding the same events in any mixture of
 * live and replayed order yields identical series, because scalar points
 * deduplicate by (step, name). Rendering emits a self-contained SVG string.
 */

import type { TrackingEvent } from "./types.js";

export interface SeriesPoint {
  step: number;
  value: number;
}

export interface ChartState {
  /** scalar series name -> ordered points, deduped by (step, name) */
  series: Map<string, SeriesPoint[]>;
  seen: Set<string>;
  phase: string;
  artifacts: string[];
  eventCount: number;
}

export function emptyChartState(): ChartState {
  return { series: new Map(), seen: new Set(), phase: "", artifacts: [], eventCount: 0 };
}

/** Fold one tracking event into the chart state (idempotent per (step, name)). */
export function addEvent(state: ChartState, event: TrackingEvent): ChartState {
  state.eventCount += 1;
  if (event.kind === "status" && event.name === "phase") {
    state.phase = String(event.value);
    return state;
  }
  if (event.kind === "artifact") {
    if (!state.artifacts.includes(String(event.value))) {
      state.artifacts.push(String(event.value));
    }
    return state;
  }
  if (event.kind !== "scalar" || typeof event.value !== "number") {
    return state;
  }
  const key = `${event.step}|${event.name}`;
  if (state.seen.has(key)) {
    return state; // replayed point
  }
  state.seen.add(key);
  let points = state.series.get(event.name);
  if (!points) {
    points = [];
    state.series.set(event.name, points);
  }
  points.push({ step: event.step, value: event.value });
  points.sort((a, b) => a.step - b.step);
  return state;
}

/** Deterministic snapshot of the deduped data (for tests and comparisons). */
export function chartData(state: ChartState): Record<string, SeriesPoint[]> {
  const out: Record<string, SeriesPoint[]> = {};
  for (const name of [...state.series.keys()].sort()) {
    out[name] = state.series.get(name)!.map((p) => ({ ...p }));
  }
  return out;
}

const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];

export interface SvgOptions {
  width?: number;
  height?: number;
  yMin?: number;
  yMax?: number;
}

/** Render selected series as an SVG line chart string. */
export function renderSvg(
  state: ChartState,
  names: string[],
  options: SvgOptions = {},
): string {
  const width = options.width ?? 560;
  const height = options.height ?? 220;
  const pad = 34;
  const present = names.filter((n) => (state.series.get(n)?.length ?? 0) > 0);
  if (present.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"><text x="12" y="24" fill="#6b7280">waiting for events…</text></svg>`;
  }
  const all = present.flatMap((n) => state.series.get(n)!);
  const xs = all.map((p) => p.step);
  const ys = all.map((p) => p.value);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs, xMin + 1);
  const yMin = options.yMin ?? Math.min(...ys);
  const yMax = options.yMax ?? Math.max(...ys, yMin + 1e-9);
  const sx = (x: number) => pad + ((x - xMin) / (xMax - xMin)) * (width - 2 * pad);
  const sy = (y: number) => height - pad - ((y - yMin) / (yMax - yMin)) * (height - 2 * pad);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" role="img">`,
    `<line x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}" stroke="#9ca3af"/>`,
    `<line x1="${pad}" y1="${pad}" x2="${pad}" y2="${height - pad}" stroke="#9ca3af"/>`,
    `<text x="${pad}" y="${height - 8}" font-size="10" fill="#6b7280">step ${xMin}</text>`,
    `<text x="${width - pad}" y="${height - 8}" font-size="10" text-anchor="end" fill="#6b7280">step ${xMax}</text>`,
    `<text x="4" y="${pad}" font-size="10" fill="#6b7280">${yMax.toFixed(3)}</text>`,
    `<text x="4" y="${height - pad}" font-size="10" fill="#6b7280">${yMin.toFixed(3)}</text>`,
  ];
  present.forEach((name, i) => {
    const color = PALETTE[i % PALETTE.length];
    const points = state.series.get(name)!;
    const path = points
      .map((p, j) => `${j === 0 ? "M" : "L"}${sx(p.step).toFixed(1)},${sy(p.value).toFixed(1)}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    parts.push(
      `<text x="${width - pad}" y="${pad + 12 * i}" font-size="10" text-anchor="end" fill="${color}">${name}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
