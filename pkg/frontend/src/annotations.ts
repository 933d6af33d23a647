// Pending analyst verdicts for the displayed extraction. The PUT stays
// disabled until at least one cluster has a verdict; submissions append
// on the server, so earlier judgments at other thresholds survive.

import type { ApiClient } from "./api.js";
import type { AnnotationsResponse } from "./types.js";

export type Verdict = "normal" | "fault";

export class AnnotationDraft {
  private verdicts = new Map<number, Verdict>();
  note = "";
  author = "";

  setVerdict(clusterId: number, verdict: Verdict | null): void {
    if (verdict === null) this.verdicts.delete(clusterId);
    else this.verdicts.set(clusterId, verdict);
  }

  get canSubmit(): boolean {
    return this.verdicts.size > 0;
  }

  payload(threshold: number) {
    const verdicts: Record<string, Verdict> = {};
    for (const [clusterId, verdict] of this.verdicts) {
      verdicts[String(clusterId)] = verdict;
    }
    return { threshold, verdicts, note: this.note, author: this.author };
  }

  async submit(
    api: ApiClient,
    runId: string,
    threshold: number,
  ): Promise<AnnotationsResponse> {
    if (!this.canSubmit) throw new Error("no verdicts chosen");
    const response = await api.putAnnotations(runId, this.payload(threshold));
    this.verdicts.clear();
    this.note = "";
    return response;
  }
}
