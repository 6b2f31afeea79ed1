/** Run monitor: live charts fed by the event stream, phase indicator, and
 * a final summary once the job reaches a terminal status. */

import { ApiClient } from "../api.js";
import { addEvent, emptyChartState, renderSvg } from "../chart.js";
import { followJob } from "../events.js";
import type { JobRecord } from "../types.js";

const DEV_METRICS = ["dev/auc", "dev/mrr", "dev/ndcg5", "dev/ndcg10"];

function metricTable(job: JobRecord): string {
  const result = job.result ?? {};
  const rows = Object.entries(result)
    .map(([k, v]) => `<tr><td>${k}</td><td>${typeof v === "number" ? v.toFixed(4) : String(v)}</td></tr>`)
    .join("");
  return `<table class="metrics"><tbody>${rows}</tbody></table>`;
}

export function renderMonitor(root: HTMLElement, api: ApiClient, jobId: string): () => void {
  root.innerHTML = `
    <h2>Run monitor <span class="muted">job ${jobId}</span></h2>
    <p>phase: <span id="phase" class="badge off">connecting…</span>
       <span id="event-count" class="muted"></span></p>
    <h3>Training loss</h3><div id="loss-chart"></div>
    <h3>Validation metrics</h3><div id="metric-chart"></div>
    <div id="final"></div>`;
  const phaseEl = root.querySelector<HTMLElement>("#phase")!;
  const countEl = root.querySelector<HTMLElement>("#event-count")!;
  const lossEl = root.querySelector<HTMLElement>("#loss-chart")!;
  const metricEl = root.querySelector<HTMLElement>("#metric-chart")!;
  const finalEl = root.querySelector<HTMLElement>("#final")!;

  const state = emptyChartState();
  let dirty = false;

  const repaint = () => {
    if (!dirty) return;
    dirty = false;
    phaseEl.textContent = state.phase || "queued";
    phaseEl.className = `badge ${state.phase === "failed" ? "err" : state.phase === "finished" ? "ok" : "off"}`;
    countEl.textContent = `${state.eventCount} events`;
    lossEl.innerHTML = renderSvg(state, ["train/loss", "train/epoch_loss"]);
    metricEl.innerHTML = renderSvg(state, DEV_METRICS, { yMin: 0, yMax: 1 });
  };
  const painter = setInterval(repaint, 200);

  const finish = async () => {
    dirty = true;
    repaint();
    try {
      const job = await api.getJob(jobId);
      finalEl.innerHTML =
        job.status === "failed"
          ? `<p class="error">job failed: ${job.error ?? "unknown error"}</p>`
          : `<h3>Final result</h3>${metricTable(job)}`;
    } catch {
      finalEl.innerHTML = `<p class="error">could not fetch final job record</p>`;
    }
  };

  const stop = followJob(
    api.eventsUrl(jobId),
    (event) => {
      addEvent(state, event);
      dirty = true;
    },
    () => void finish(),
  );
  dirty = true;
  repaint();

  return () => {
    clearInterval(painter);
    stop();
  };
}
