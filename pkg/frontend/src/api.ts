// Typed client for the run-store API. The console computes nothing
// locally; every label it renders came out of these calls.

import type {
  AnnotationsResponse,
  ExtractionResponse,
  KdistResponse,
  PcaResponse,
  ReachabilityResponse,
  RunStatus,
  RunSummary,
  TimeseriesResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(response.status, body.code ?? "unknown", body.message ?? response.statusText);
  }
  return body as T;
}

export interface ApiClient {
  listRuns(): Promise<{ runs: RunSummary[] }>;
  runStatus(runId: string): Promise<RunStatus>;
  reachability(runId: string): Promise<ReachabilityResponse>;
  kdist(runId: string): Promise<KdistResponse>;
  extract(runId: string, threshold: number): Promise<ExtractionResponse>;
  timeseries(runId: string, channels: string[]): Promise<TimeseriesResponse>;
  pca(runId: string): Promise<PcaResponse>;
  putAnnotations(
    runId: string,
    entry: { threshold: number; verdicts: Record<string, "normal" | "fault">; note: string; author: string },
  ): Promise<AnnotationsResponse>;
  annotations(runId: string): Promise<AnnotationsResponse>;
}

export function createClient(base = ""): ApiClient {
  return {
    listRuns: () => request(`${base}/api/runs`),
    runStatus: (runId) => request(`${base}/api/runs/${runId}`),
    reachability: (runId) => request(`${base}/api/runs/${runId}/reachability`),
    kdist: (runId) => request(`${base}/api/runs/${runId}/kdist`),
    extract: (runId, threshold) =>
      request(`${base}/api/runs/${runId}/extract`, {
        method: "POST",
        body: JSON.stringify({ threshold }),
      }),
    timeseries: (runId, channels) =>
      request(`${base}/api/runs/${runId}/timeseries?channels=${channels.join(",")}`),
    pca: (runId) => request(`${base}/api/runs/${runId}/pca`),
    putAnnotations: (runId, entry) =>
      request(`${base}/api/runs/${runId}/annotations`, {
        method: "PUT",
        body: JSON.stringify(entry),
      }),
    annotations: (runId) => request(`${base}/api/runs/${runId}/annotations`),
  };
}
