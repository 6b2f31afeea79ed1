/** New-experiment form: model picker, dataset picker, editable parameters
 * seeded from the server's defaults; the start button posts the job. */

import { ApiClient, ApiError } from "../api.js";
import type { DatasetInfo, ModelInfo } from "../types.js";
import {
  ExperimentForm,
  formToJobParams,
  validateExperimentForm,
  violationField,
} from "../validate.js";

const PARAM_FIELDS = [
  "seed",
  "epochs",
  "batch_size",
  "learning_rate",
  "embedding_dim",
  "attention_heads",
  "history_len",
  "title_len",
  "negatives",
] as const;

function fieldRow(name: string, value: string): string {
  return `
    <label class="field" data-field="${name}">
      <span>${name}</span>
      <input name="${name}" value="${value}" autocomplete="off"/>
      <em class="field-error" data-error-for="${name}"></em>
    </label>`;
}

export function renderExperiment(
  root: HTMLElement,
  api: ApiClient,
  navigate: (hash: string) => void,
  notify: (message: string, isError?: boolean) => void,
): void {
  root.innerHTML = `<h2>New experiment</h2><div id="experiment-body">loading…</div>`;
  const body = root.querySelector<HTMLElement>("#experiment-body")!;

  const load = async () => {
    let models: ModelInfo[];
    let datasets: DatasetInfo[];
    try {
      [models, datasets] = await Promise.all([api.getModels(), api.getDatasets()]);
    } catch (err) {
      body.innerHTML = `
        <p class="error">cannot reach server: ${(err as Error).message}</p>
        <button id="retry">Retry</button>`;
      body.querySelector<HTMLButtonElement>("#retry")!.onclick = () => void load();
      return;
    }
    const ready = datasets.filter((d) => d.corpus_ready);
    const first = models[0];
    body.innerHTML = `
      <form id="experiment-form" novalidate>
        <label class="field" data-field="model_name">
          <span>model_name</span>
          <select name="model_name">
            ${models.map((m) => `<option value="${m.name}">${m.name}</option>`).join("")}
          </select>
          <em class="field-error" data-error-for="model_name"></em>
        </label>
        <label class="field" data-field="dataset">
          <span>dataset</span>
          <select name="dataset">
            ${ready.map((d) => `<option value="${d.name}">${d.name}</option>`).join("")}
          </select>
          <em class="field-error" data-error-for="dataset"></em>
        </label>
        <div id="params">${PARAM_FIELDS.map((f) => fieldRow(f, String(first?.defaults[f] ?? ""))).join("")}</div>
        <p class="muted" id="model-card"></p>
        <button type="submit" id="start">Start</button>
        <em class="field-error" data-error-for="form"></em>
      </form>`;
    if (ready.length === 0) {
      notify("no corpus is ready; generate or preprocess a dataset first", true);
    }
    const form = body.querySelector<HTMLFormElement>("#experiment-form")!;
    const modelSelect = form.querySelector<HTMLSelectElement>("select[name=model_name]")!;
    const card = body.querySelector<HTMLElement>("#model-card")!;

    const seedDefaults = () => {
      const model = models.find((m) => m.name === modelSelect.value);
      if (!model) return;
      card.textContent = `${model.news_encoder} | ${model.user_encoder}`;
      for (const field of PARAM_FIELDS) {
        const input = form.querySelector<HTMLInputElement>(`input[name=${field}]`);
        if (input && model.defaults[field] !== undefined) {
          input.value = String(model.defaults[field]);
        }
      }
    };
    modelSelect.onchange = seedDefaults;
    seedDefaults();

    form.onsubmit = async (submitEvent) => {
      submitEvent.preventDefault();
      form.querySelectorAll<HTMLElement>(".field-error").forEach((el) => (el.textContent = ""));
      const data = new FormData(form);
      const state = Object.fromEntries(
        [...data.entries()].map(([k, v]) => [k, String(v)]),
      ) as unknown as ExperimentForm;
      const errors = validateExperimentForm(state);
      if (errors.length > 0) {
        for (const error of errors) {
          const slot = form.querySelector<HTMLElement>(`[data-error-for="${error.field}"]`);
          if (slot) slot.textContent = error.message;
        }
        return; // no request leaves the client on validation failure
      }
      try {
        const { job_id } = await api.postJob("train", formToJobParams(state));
        notify(`training job ${job_id} queued`);
        navigate(`#/run/${job_id}`);
      } catch (err) {
        const apiError = err as ApiError;
        if (apiError.violations.length > 0) {
          for (const violation of apiError.violations) {
            const slot = form.querySelector<HTMLElement>(
              `[data-error-for="${violationField(violation)}"]`,
            );
            (slot ?? form.querySelector<HTMLElement>('[data-error-for="form"]')!).textContent =
              violation;
          }
        } else {
          notify(apiError.message, true);
        }
      }
    };
  };

  void load();
}
