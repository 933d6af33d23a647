import { describe, expect, it } from "vitest";

import { clusterColor, NOISE_COLOR, orderedClusterIds, segmentsOf } from "../src/segments.js";

describe("segments", () => {
  it("reorders per-row ids into traversal order", () => {
    const ordering = [2, 0, 1];
    const clusterIds = [5, 6, 7]; // by row index
    expect(orderedClusterIds(ordering, clusterIds)).toEqual([7, 5, 6]);
  });

  it("rendered boundaries equal the extraction's cluster boundaries", () => {
    // an extraction response: per-row ids, plus the traversal order
    const ordering = [0, 1, 2, 3, 4, 5, 6, 7];
    const clusterIds = [0, 0, 0, -1, 1, 1, -1, 2];
    const segments = segmentsOf(orderedClusterIds(ordering, clusterIds));
    expect(segments).toEqual([
      { start: 0, end: 3, clusterId: 0 },
      { start: 3, end: 4, clusterId: -1 },
      { start: 4, end: 6, clusterId: 1 },
      { start: 6, end: 7, clusterId: -1 },
      { start: 7, end: 8, clusterId: 2 },
    ]);
    // segments tile the ordering exactly: no gaps, no overlaps
    let cursor = 0;
    for (const segment of segments) {
      expect(segment.start).toBe(cursor);
      cursor = segment.end;
    }
    expect(cursor).toBe(ordering.length);
    // and every position keeps its response-assigned id
    for (const segment of segments) {
      for (let i = segment.start; i < segment.end; i++) {
        expect(clusterIds[ordering[i]]).toBe(segment.clusterId);
      }
    }
  });

  it("non-trivial traversal order still matches the response", () => {
    const ordering = [3, 1, 4, 0, 2];
    const clusterIds = [1, 0, -1, 0, 0];
    const segments = segmentsOf(orderedClusterIds(ordering, clusterIds));
    expect(segments).toEqual([
      { start: 0, end: 3, clusterId: 0 }, // rows 3, 1, 4... row 4 -> id 0
      { start: 3, end: 4, clusterId: 1 },
      { start: 4, end: 5, clusterId: -1 },
    ]);
  });

  it("noise renders grey, clusters cycle the palette", () => {
    expect(clusterColor(-1)).toBe(NOISE_COLOR);
    expect(clusterColor(0)).not.toBe(NOISE_COLOR);
    expect(clusterColor(0)).toBe(clusterColor(8));
  });
});
