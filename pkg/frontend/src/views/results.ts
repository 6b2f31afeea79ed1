/** Results table: one row per recorded run, verbatim from GET /api/runs. */

import { ApiClient } from "../api.js";
import type { RunSummary } from "../types.js";

function fmt(value: number | null | undefined): string {
  return value === null || value === undefined ? "–" : value.toFixed(4);
}

export function resultsRows(runs: RunSummary[]): string[][] {
  return runs.map((run) => [
    run.run_id,
    run.model_name,
    run.dataset_name,
    run.status,
    fmt(run.dev?.auc),
    fmt(run.dev?.mrr),
    fmt(run.dev?.ndcg5),
    fmt(run.dev?.ndcg10),
  ]);
}

export function renderResults(root: HTMLElement, api: ApiClient): void {
  root.innerHTML = `<h2>Results</h2><div id="results-body">loading…</div>`;
  const body = root.querySelector<HTMLElement>("#results-body")!;
  api
    .getRuns()
    .then((runs) => {
      if (runs.length === 0) {
        body.innerHTML = `<p class="muted">no recorded runs yet</p>`;
        return;
      }
      const header = ["run", "model", "dataset", "status", "auc", "mrr", "ndcg5", "ndcg10"];
      body.innerHTML = `
        <table class="metrics">
          <thead><tr>${header.map((h) => `<th>${h}</th>`).join("")}</tr></thead>
          <tbody>
            ${resultsRows(runs)
              .map((row) => `<tr>${row.map((cell) => `<td>${cell}</td>`).join("")}</tr>`)
              .join("")}
          </tbody>
        </table>`;
    })
    .catch((err) => {
      body.innerHTML = `<p class="error">cannot reach server: ${(err as Error).message}</p>`;
    });
}
