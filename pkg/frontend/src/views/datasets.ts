/** Datasets view: availability plus download/preprocess actions. */

import { ApiClient, ApiError } from "../api.js";
import type { DatasetInfo } from "../types.js";

function badge(ok: boolean, label: string): string {
  return `<span class="badge ${ok ? "ok" : "off"}">${label}</span>`;
}

export function renderDatasets(
  root: HTMLElement,
  api: ApiClient,
  notify: (message: string, isError?: boolean) => void,
): void {
  root.innerHTML = `<h2>Datasets</h2><div id="dataset-list" class="cards">loading…</div>`;
  const list = root.querySelector<HTMLElement>("#dataset-list")!;

  const load = async () => {
    let datasets: DatasetInfo[];
    try {
      datasets = await api.getDatasets();
    } catch (err) {
      list.innerHTML = `<p class="error">cannot reach server: ${(err as Error).message}</p>`;
      return;
    }
    list.innerHTML = datasets
      .map(
        (d) => `
        <div class="card" data-name="${d.name}">
          <h3>${d.name}</h3>
          <p>${badge(d.downloaded, d.downloaded ? "downloaded" : "not downloaded")}
             ${badge(d.corpus_ready, d.corpus_ready ? "corpus ready" : "no corpus")}</p>
          <p class="muted">${d.notes || (d.files.length ? d.files.join(", ") : "")}</p>
          <p>
            ${d.files.length ? `<button data-action="download" data-name="${d.name}">Download</button>` : ""}
            <button data-action="preprocess" data-name="${d.name}">${d.files.length ? "Preprocess" : "Generate"}</button>
          </p>
        </div>`,
      )
      .join("");
    list.querySelectorAll<HTMLButtonElement>("button").forEach((button) => {
      button.onclick = async () => {
        const kind = button.dataset.action!;
        const name = button.dataset.name!;
        button.disabled = true;
        try {
          const { job_id } = await api.postJob(kind, { dataset: name });
          notify(`${kind} job ${job_id} queued for ${name}`);
          poll(job_id, name);
        } catch (err) {
          notify((err as ApiError).message, true);
          button.disabled = false;
        }
      };
    });
  };

  const poll = (jobId: string, name: string) => {
    const timer = setInterval(async () => {
      try {
        const job = await api.getJob(jobId);
        if (job.status === "finished" || job.status === "failed") {
          clearInterval(timer);
          notify(
            job.status === "finished"
              ? `job for ${name} finished`
              : `job for ${name} failed: ${job.error}`,
            job.status === "failed",
          );
          void load();
        }
      } catch {
        clearInterval(timer);
      }
    }, 750);
  };

  void load();
}
