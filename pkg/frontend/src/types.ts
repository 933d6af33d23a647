// Payload shapes of the backing HTTP API (mirrors ../schemas/*.schema.json).

export interface RunSummary {
  run_id: string;
  status: string;
  dataset?: string | null;
  season?: string | null;
  use_pca?: boolean | null;
  threshold?: number | string | null;
}

export interface RunStatus {
  run_id: string;
  status: string;
  state: "queued" | "running" | "complete" | "awaiting_threshold" | "failed" | "unknown";
  stage: string | null;
  error: string | null;
}

export interface ReachabilityResponse {
  run_id: string;
  ordering: number[];
  reachability: (number | null)[];
  core_distance: (number | null)[];
  params: { eps: number; min_pts: number };
}

export interface KdistResponse {
  run_id: string;
  curve: number[];
  suggested_eps: number;
}

export interface ConfusionBlock {
  tp: number;
  fp: number;
  fn: number;
  tn: number;
}

export interface MetricsRow {
  precision: number | null;
  recall: number | null;
  f1: number | null;
  accuracy: number | null;
  counts?: ConfusionBlock;
}

export interface Interval {
  start: string;
  end: string;
  label?: string;
}

export interface ExtractionResponse {
  run_id: string;
  algorithm: "optics";
  threshold: number;
  cluster_ids: number[];
  num_clusters: number;
  cluster_sizes: Record<string, number>;
  flags: number[];
  normal_cluster: number;
  ambiguous_majority: boolean;
  metrics: MetricsRow | null;
  intervals: Interval[];
}

export interface TimeseriesResponse {
  run_id: string;
  channels: Record<string, { timestamps: string[]; values: number[] }>;
}

export interface PcaResponse {
  run_id: string;
  eigenvalues: number[];
  explained_variance_ratio: number[];
  pc_count: number;
  loadings: Record<string, [number, number]>;
  correlation_classes: { a: string; b: string; class: string; weak: boolean }[];
}

export interface AnnotationEntry {
  threshold: number;
  verdicts: Record<string, "normal" | "fault">;
  note: string;
  author: string;
  time: string;
}

export interface AnnotationsResponse {
  run_id: string;
  annotations: AnnotationEntry[];
}
