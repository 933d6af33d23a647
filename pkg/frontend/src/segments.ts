// Contiguous colored regions of the reachability chart. The chart
// shades positions by cluster, so its region boundaries must equal the
// cluster boundaries implied by the extraction response; keeping this a
// pure function lets tests assert that equality directly.

export interface Segment {
  start: number; // first position (inclusive), in traversal order
  end: number; // last position (exclusive)
  clusterId: number; // -1 for noise
}

/** Per-row cluster ids rearranged into traversal order. */
export function orderedClusterIds(ordering: number[], clusterIds: number[]): number[] {
  return ordering.map((row) => clusterIds[row]);
}

/** Maximal runs of equal cluster id along the ordering. */
export function segmentsOf(orderedIds: number[]): Segment[] {
  const segments: Segment[] = [];
  let start = 0;
  for (let i = 1; i <= orderedIds.length; i++) {
    if (i === orderedIds.length || orderedIds[i] !== orderedIds[start]) {
      segments.push({ start, end: i, clusterId: orderedIds[start] });
      start = i;
    }
  }
  return segments;
}

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#17becf",
];
export const NOISE_COLOR = "#9e9e9e";

export function clusterColor(clusterId: number): string {
  return clusterId < 0 ? NOISE_COLOR : PALETTE[clusterId % PALETTE.length];
}
