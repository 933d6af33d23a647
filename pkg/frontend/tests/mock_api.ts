// In-memory stand-in for the HTTP API. Extraction slices a fixed
// labeling by threshold so different thresholds yield different (but
// deterministic) responses, and annotations append like the real store.

import type { ApiClient } from "../src/api.js";
import type {
  AnnotationEntry,
  ExtractionResponse,
  ReachabilityResponse,
} from "../src/types.js";

export interface MockOptions {
  extractDelayMs?: number;
  ordering?: number[];
  reachability?: (number | null)[];
}

export class MockApi implements ApiClient {
  extractCalls: number[] = [];
  annotationStore: AnnotationEntry[] = [];
  private delay: number;
  private ordering: number[];
  private reach: (number | null)[];
  private pendingResolvers: (() => void)[] = [];

  constructor(options: MockOptions = {}) {
    this.delay = options.extractDelayMs ?? 0;
    this.ordering = options.ordering ?? [0, 2, 1, 3, 4];
    this.reach = options.reachability ?? [null, 0.2, 0.3, 1.5, 0.25];
  }

  /** resolve all in-flight extractions (when constructed with manual delay -1) */
  release(): void {
    for (const resolve of this.pendingResolvers.splice(0)) resolve();
  }

  private wait(): Promise<void> {
    if (this.delay < 0) {
      return new Promise((resolve) => this.pendingResolvers.push(resolve));
    }
    return new Promise((resolve) => setTimeout(resolve, this.delay));
  }

  async listRuns() {
    return { runs: [{ run_id: "r1", status: "awaiting_threshold" }] };
  }

  async runStatus(runId: string) {
    return {
      run_id: runId,
      status: "awaiting_threshold",
      state: "awaiting_threshold" as const,
      stage: null,
      error: null,
    };
  }

  async reachability(runId: string): Promise<ReachabilityResponse> {
    return {
      run_id: runId,
      ordering: [...this.ordering],
      reachability: [...this.reach],
      core_distance: this.reach.map((v) => (v === null ? 0.2 : v)),
      params: { eps: 2.0, min_pts: 3 },
    };
  }

  async kdist(runId: string) {
    return { run_id: runId, curve: [0.1, 0.2, 0.3, 1.4], suggested_eps: 0.3 };
  }

  async extract(runId: string, threshold: number): Promise<ExtractionResponse> {
    this.extractCalls.push(threshold);
    await this.wait();
    // rows whose reachability clears the line become noise; position 0
    // opens the cluster because its core distance is below any tested line
    const ids = new Array<number>(this.ordering.length).fill(0);
    this.ordering.forEach((row, position) => {
      const value = this.reach[position];
      if (position > 0 && value !== null && value > threshold) ids[row] = -1;
    });
    const sizes: Record<string, number> = {};
    for (const id of ids) sizes[String(id)] = (sizes[String(id)] ?? 0) + 1;
    return {
      run_id: runId,
      algorithm: "optics",
      threshold,
      cluster_ids: ids,
      num_clusters: 1,
      cluster_sizes: sizes,
      flags: ids.map((id) => (id === 0 ? 0 : 1)),
      normal_cluster: 0,
      ambiguous_majority: false,
      metrics: null,
      intervals: [],
    };
  }

  async timeseries(runId: string) {
    return { run_id: runId, channels: {} };
  }

  async pca(runId: string) {
    return {
      run_id: runId,
      eigenvalues: [2, 1],
      explained_variance_ratio: [0.67, 0.33],
      pc_count: 2,
      loadings: { a: [0.7, 0.1] as [number, number], b: [-0.7, 0.1] as [number, number] },
      correlation_classes: [{ a: "a", b: "b", class: "inverse", weak: false }],
    };
  }

  async putAnnotations(
    runId: string,
    entry: { threshold: number; verdicts: Record<string, "normal" | "fault">; note: string; author: string },
  ) {
    this.annotationStore.push({ ...entry, time: "2020-01-01T00:00:00" });
    return { run_id: runId, annotations: [...this.annotationStore] };
  }

  async annotations(runId: string) {
    return { run_id: runId, annotations: [...this.annotationStore] };
  }
}
