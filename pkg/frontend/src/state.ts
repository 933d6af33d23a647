// Console state: selected run, current threshold, live extraction.
// Extraction requests are debounced (one per drag settle) and carry a
// sequence number; a response that is not the newest in flight, or that
// no longer matches the displayed threshold, is discarded.

import type { ApiClient } from "./api.js";
import { debounce } from "./debounce.js";
import type { ExtractionResponse, ReachabilityResponse } from "./types.js";

export const DEBOUNCE_MS = 150;

export interface ConsoleState {
  runId: string | null;
  threshold: number | null;
  reachability: ReachabilityResponse | null;
  extraction: ExtractionResponse | null;
  channels: string[];
  error: string | null;
}

type Listener = (state: ConsoleState) => void;

export class ConsoleStore {
  private state: ConsoleState = {
    runId: null,
    threshold: null,
    reachability: null,
    extraction: null,
    channels: [],
    error: null,
  };
  private sequence = 0;
  private listeners: Listener[] = [];
  private requestExtract = debounce(() => void this.extractNow(), DEBOUNCE_MS);

  constructor(private api: ApiClient) {}

  get current(): ConsoleState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(patch: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  async selectRun(runId: string): Promise<void> {
    this.requestExtract.cancel();
    this.sequence++; // invalidate any in-flight extraction
    this.emit({
      runId,
      threshold: null,
      reachability: null,
      extraction: null,
      error: null,
    });
    const reachability = await this.api.reachability(runId);
    if (this.state.runId === runId) this.emit({ reachability });
  }

  /** Move the threshold line. Returns false for non-positive values. */
  setThreshold(threshold: number): boolean {
    if (!(threshold > 0) || !Number.isFinite(threshold)) return false;
    this.emit({ threshold });
    this.requestExtract();
    return true;
  }

  /** Bypass the debounce (used on explicit commit, not drag). */
  flushExtract(): void {
    this.requestExtract.flush();
  }

  private async extractNow(): Promise<void> {
    const { runId, threshold } = this.state;
    if (runId === null || threshold === null) return;
    const seq = ++this.sequence;
    try {
      const extraction = await this.api.extract(runId, threshold);
      if (seq !== this.sequence) return; // a newer request took over
      if (extraction.threshold !== this.state.threshold) return; // stale line
      this.emit({ extraction, error: null });
    } catch (err) {
      if (seq !== this.sequence) return;
      this.emit({ error: err instanceof Error ? err.message : String(err) });
    }
  }
}
