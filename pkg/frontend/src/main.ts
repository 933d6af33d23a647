// Page wiring: run picker, reachability chart with draggable threshold,
// linked scatter/time-strip/metrics panels, k-distance eps picker and
// the annotation form.

import { AnnotationDraft } from "./annotations.js";
import { createClient } from "./api.js";
import { ReachabilityChart, renderKdist, renderScatter, renderTimeStrip } from "./charts.js";
import { ConsoleStore } from "./state.js";
import type { ExtractionResponse, MetricsRow } from "./types.js";

const api = createClient();
const store = new ConsoleStore(api);
const draft = new AnnotationDraft();

const el = (id: string) => document.getElementById(id) as HTMLElement;

let chart: ReachabilityChart | null = null;
let pcaCoords: [number, number][] | null = null;
let highlightRow: number | null = null;

function metricCell(value: number | null): string {
  return value === null ? "NaN" : value.toFixed(3);
}

function renderMetrics(extraction: ExtractionResponse | null): void {
  const panel = el("metrics");
  if (!extraction) {
    panel.textContent = "";
    return;
  }
  if (!extraction.metrics) {
    panel.textContent = "no ground truth for this run; intervals shown below";
    return;
  }
  const m: MetricsRow = extraction.metrics;
  panel.innerHTML =
    "<table><tr><th>precision</th><th>recall</th><th>F1</th><th>accuracy</th></tr>" +
    `<tr><td>${metricCell(m.precision)}</td><td>${metricCell(m.recall)}</td>` +
    `<td>${metricCell(m.f1)}</td><td>${metricCell(m.accuracy)}</td></tr></table>` +
    (extraction.ambiguous_majority
      ? "<p class='warn'>ambiguous majority: two clusters tie for largest</p>"
      : "");
}

function renderClusterList(extraction: ExtractionResponse | null): void {
  const list = el("clusters");
  list.innerHTML = "";
  if (!extraction) return;
  for (const [id, size] of Object.entries(extraction.cluster_sizes)) {
    const row = document.createElement("div");
    const name = id === "-1" ? "noise" : `cluster ${id}`;
    const select = document.createElement("select");
    select.innerHTML =
      "<option value=''>no verdict</option><option value='normal'>normal</option><option value='fault'>fault</option>";
    select.addEventListener("change", () => {
      const v = select.value as "" | "normal" | "fault";
      draft.setVerdict(Number(id), v === "" ? null : v);
      (el("annotate") as HTMLButtonElement).disabled = !draft.canSubmit;
    });
    row.append(`${name}: ${size} rows `, select);
    list.append(row);
  }
}

async function refreshAnnotations(runId: string): Promise<void> {
  const { annotations } = await api.annotations(runId);
  el("annotations").innerHTML = annotations
    .map(
      (a) =>
        `<li>t=${a.threshold} ${Object.entries(a.verdicts)
          .map(([c, v]) => `${c}:${v}`)
          .join(" ")} — ${a.note} (${a.author || "anon"}, ${a.time})</li>`,
    )
    .join("");
}

store.subscribe((state) => {
  if (state.reachability && !chart) {
    chart = new ReachabilityChart(el("reachability"), {
      onThresholdDrag: (value) => store.setThreshold(value),
      onDragEnd: (value) => {
        store.setThreshold(value);
        store.flushExtract();
      },
      onHover: (row) => {
        highlightRow = row;
        if (pcaCoords) {
          renderScatter(el("scatter"), pcaCoords, state.extraction?.cluster_ids ?? null, row);
        }
      },
    });
  }
  if (state.reachability && chart) {
    chart.render(state.reachability, state.extraction, state.threshold);
  }
  renderMetrics(state.extraction);
  renderClusterList(state.extraction);
  if (pcaCoords) {
    renderScatter(el("scatter"), pcaCoords, state.extraction?.cluster_ids ?? null, highlightRow);
  }
  if (state.extraction && state.runId) {
    void api
      .timeseries(state.runId, channelSelection())
      .then((series) => renderTimeStrip(el("timestrip"), series, state.extraction!.intervals))
      .catch(() => undefined);
  }
  el("error").textContent = state.error ?? "";
});

function channelSelection(): string[] {
  const input = el("channels") as HTMLInputElement;
  return input.value
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean)
    .slice(0, 4);
}

async function boot(): Promise<void> {
  const { runs } = await api.listRuns();
  const picker = el("runs") as HTMLSelectElement;
  picker.innerHTML = runs
    .map((r) => `<option value="${r.run_id}">${r.run_id} (${r.status})</option>`)
    .join("");
  picker.addEventListener("change", () => void openRun(picker.value));
  if (runs.length) await openRun(runs[0].run_id);
}

async function openRun(runId: string): Promise<void> {
  chart = null;
  el("reachability").innerHTML = "";
  pcaCoords = null;
  await store.selectRun(runId);
  const [kdist, pca] = await Promise.all([api.kdist(runId), api.pca(runId)]);
  renderKdist(el("kdist"), kdist, (eps) => {
    el("eps-pick").textContent = `eps for the next run config: ${eps.toPrecision(4)}`;
  });
  el("eps-pick").textContent = `suggested eps: ${kdist.suggested_eps.toPrecision(4)}`;
  const loadings = Object.entries(pca.loadings);
  el("loadings").innerHTML = loadings
    .map(([name, [w1, w2]]) => `<tr><td>${name}</td><td>${w1.toFixed(2)}</td><td>${w2.toFixed(2)}</td></tr>`)
    .join("");
  await refreshAnnotations(runId);
}

el("annotate").addEventListener("click", () => {
  const state = store.current;
  if (!state.runId || state.threshold === null || !draft.canSubmit) return;
  draft.note = (el("note") as HTMLInputElement).value;
  draft.author = (el("author") as HTMLInputElement).value;
  void draft
    .submit(api, state.runId, state.threshold)
    .then(() => refreshAnnotations(state.runId!))
    .then(() => {
      (el("annotate") as HTMLButtonElement).disabled = true;
      (el("note") as HTMLInputElement).value = "";
    });
});

void boot();
