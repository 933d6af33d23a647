// SVG renderers for the console panels. All scales are linear; the
// reachability chart owns the draggable threshold line.

import { clusterColor, orderedClusterIds, segmentsOf } from "./segments.js";
import type {
  ExtractionResponse,
  Interval,
  KdistResponse,
  ReachabilityResponse,
  TimeseriesResponse,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const UNDEF_COLOR = "#b71c1c";

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, String(value));
  return el;
}

function clearChildren(el: Element): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

export interface ReachabilityChartOptions {
  width?: number;
  height?: number;
  onThresholdDrag(value: number): void;
  onDragEnd(value: number): void;
  onHover?(row: number | null): void;
}

/** Bar chart of reachability in traversal order with a draggable line. */
export class ReachabilityChart {
  private width: number;
  private height: number;
  private margin = 36;
  private cap = 1;
  private root: SVGSVGElement;
  private barsGroup: SVGGElement;
  private line: SVGLineElement;
  private label: SVGTextElement;
  private dragging = false;

  constructor(
    container: HTMLElement,
    private options: ReachabilityChartOptions,
  ) {
    this.width = options.width ?? 900;
    this.height = options.height ?? 300;
    this.root = svgElement("svg", {
      width: this.width,
      height: this.height,
      viewBox: `0 0 ${this.width} ${this.height}`,
    });
    this.barsGroup = svgElement("g", {});
    this.line = svgElement("line", {
      x1: this.margin,
      x2: this.width - this.margin,
      y1: 0,
      y2: 0,
      stroke: "#d62728",
      "stroke-width": 2,
      "stroke-dasharray": "6,3",
      cursor: "ns-resize",
    });
    this.label = svgElement("text", {
      x: this.width - this.margin,
      y: 0,
      "text-anchor": "end",
      "font-size": 12,
      fill: "#d62728",
    });
    this.root.append(this.barsGroup, this.line, this.label);
    container.append(this.root);
    this.wireDrag();
  }

  private yScale(value: number): number {
    const usable = this.height - 2 * this.margin;
    return this.height - this.margin - (value / this.cap) * usable;
  }

  private valueAt(clientY: number): number {
    const rect = this.root.getBoundingClientRect();
    const y = ((clientY - rect.top) / rect.height) * this.height;
    const usable = this.height - 2 * this.margin;
    const value = ((this.height - this.margin - y) / usable) * this.cap;
    return Math.max(value, this.cap * 1e-4);
  }

  private wireDrag(): void {
    this.line.addEventListener("pointerdown", (event) => {
      this.dragging = true;
      this.line.setPointerCapture(event.pointerId);
    });
    this.line.addEventListener("pointermove", (event) => {
      if (!this.dragging) return;
      this.options.onThresholdDrag(this.valueAt(event.clientY));
    });
    this.line.addEventListener("pointerup", (event) => {
      if (!this.dragging) return;
      this.dragging = false;
      this.line.releasePointerCapture(event.pointerId);
      this.options.onDragEnd(this.valueAt(event.clientY));
    });
  }

  render(
    reachability: ReachabilityResponse,
    extraction: ExtractionResponse | null,
    threshold: number | null,
  ): void {
    const values = reachability.reachability;
    const finite = values.filter((v): v is number => v !== null);
    this.cap = 1.1 * Math.max(...finite, threshold ?? 0, 1e-9);
    clearChildren(this.barsGroup);

    const n = values.length;
    const plotWidth = this.width - 2 * this.margin;
    const barWidth = Math.max(plotWidth / Math.max(n, 1), 0.5);
    // color by contiguous segment so chart boundaries are, by
    // construction, the cluster boundaries of the extraction response
    const colors = new Array<string>(n).fill("#1f77b4");
    if (extraction) {
      const ordered = orderedClusterIds(reachability.ordering, extraction.cluster_ids);
      for (const segment of segmentsOf(ordered)) {
        const color = clusterColor(segment.clusterId);
        for (let i = segment.start; i < segment.end; i++) colors[i] = color;
      }
    }

    for (let i = 0; i < n; i++) {
      const value = values[i];
      const isUndefined = value === null;
      const v = isUndefined ? this.cap : value;
      const x = this.margin + (i / Math.max(n - 1, 1)) * plotWidth;
      const bar = svgElement("rect", {
        x: x - barWidth / 2,
        y: this.yScale(v),
        width: barWidth,
        height: this.height - this.margin - this.yScale(v),
        fill: isUndefined ? UNDEF_COLOR : colors[i],
        "fill-opacity": 0.85,
      });
      const row = reachability.ordering[i];
      bar.addEventListener("pointerenter", () => this.options.onHover?.(row));
      bar.addEventListener("pointerleave", () => this.options.onHover?.(null));
      this.barsGroup.append(bar);
    }
    if (threshold !== null) {
      const y = this.yScale(Math.min(threshold, this.cap));
      this.line.setAttribute("y1", String(y));
      this.line.setAttribute("y2", String(y));
      this.label.setAttribute("y", String(y - 6));
      this.label.textContent = `threshold ${threshold.toPrecision(4)}`;
      this.line.style.display = "";
      this.label.style.display = "";
    } else {
      this.line.style.display = "none";
      this.label.style.display = "none";
    }
  }
}

/** Sorted k-distance curve; clicking it proposes an eps. */
export function renderKdist(
  container: HTMLElement,
  kdist: KdistResponse,
  onPick: (eps: number) => void,
): void {
  clearChildren(container);
  const width = 420;
  const height = 220;
  const margin = 30;
  const svg = svgElement("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  const max = Math.max(...kdist.curve, 1e-9);
  const x = (i: number) => margin + (i / Math.max(kdist.curve.length - 1, 1)) * (width - 2 * margin);
  const y = (v: number) => height - margin - (v / max) * (height - 2 * margin);
  const points = kdist.curve.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(" ");
  svg.append(
    svgElement("polyline", { points, fill: "none", stroke: "#1f77b4", "stroke-width": 1.5 }),
  );
  const suggested = svgElement("line", {
    x1: margin,
    x2: width - margin,
    y1: y(kdist.suggested_eps),
    y2: y(kdist.suggested_eps),
    stroke: "#d62728",
    "stroke-dasharray": "4,3",
  });
  svg.append(suggested);
  svg.addEventListener("click", (event) => {
    const rect = svg.getBoundingClientRect();
    const clickY = ((event.clientY - rect.top) / rect.height) * height;
    const value = ((height - margin - clickY) / (height - 2 * margin)) * max;
    if (value > 0) onPick(value);
  });
  container.append(svg);
}

/** PC1 x PC2 scatter colored by the current extraction. */
export function renderScatter(
  container: HTMLElement,
  coords: [number, number][],
  clusterIds: number[] | null,
  highlightRow: number | null,
): void {
  clearChildren(container);
  const width = 420;
  const height = 320;
  const margin = 24;
  const svg = svgElement("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  const xs = coords.map((c) => c[0]);
  const ys = coords.map((c) => c[1]);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (v: number) => margin + ((v - x0) / Math.max(x1 - x0, 1e-9)) * (width - 2 * margin);
  const sy = (v: number) => height - margin - ((v - y0) / Math.max(y1 - y0, 1e-9)) * (height - 2 * margin);
  coords.forEach(([px, py], row) => {
    const dot = svgElement("circle", {
      cx: sx(px),
      cy: sy(py),
      r: row === highlightRow ? 5 : 2,
      fill: clusterIds ? clusterColor(clusterIds[row]) : "#1f77b4",
      stroke: row === highlightRow ? "#000" : "none",
    });
    svg.append(dot);
  });
  container.append(svg);
}

/** Channel strips with fault-interval boxes from the extraction. */
export function renderTimeStrip(
  container: HTMLElement,
  series: TimeseriesResponse,
  intervals: Interval[],
): void {
  clearChildren(container);
  const names = Object.keys(series.channels);
  const width = 900;
  const stripHeight = 90;
  const margin = 36;
  const height = names.length * stripHeight + 2 * margin;
  const svg = svgElement("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  names.forEach((name, rowIndex) => {
    const { timestamps, values } = series.channels[name];
    if (!timestamps.length) return;
    const t0 = Date.parse(timestamps[0]);
    const t1 = Date.parse(timestamps[timestamps.length - 1]);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const top = margin + rowIndex * stripHeight;
    const x = (t: number) => margin + ((t - t0) / Math.max(t1 - t0, 1)) * (width - 2 * margin);
    const y = (v: number) =>
      top + stripHeight - 18 - ((v - lo) / Math.max(hi - lo, 1e-9)) * (stripHeight - 32);
    const points = timestamps
      .map((ts, i) => `${x(Date.parse(ts)).toFixed(1)},${y(values[i]).toFixed(1)}`)
      .join(" ");
    svg.append(
      svgElement("polyline", { points, fill: "none", stroke: "#1f77b4", "stroke-width": 1 }),
    );
    for (const interval of intervals) {
      const left = x(Date.parse(interval.start));
      const right = x(Date.parse(interval.end));
      svg.append(
        svgElement("rect", {
          x: left,
          y: top + 4,
          width: Math.max(right - left, 1),
          height: stripHeight - 24,
          fill: "#d62728",
          "fill-opacity": 0.12,
          stroke: "#d62728",
        }),
      );
    }
    const label = svgElement("text", { x: margin, y: top, "font-size": 11, fill: "#555" });
    label.textContent = name;
    svg.append(label);
  });
  container.append(svg);
}
