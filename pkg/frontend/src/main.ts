/** Hash-routed single page app over the control API. */

import { ApiClient } from "./api.js";
import { renderDatasets } from "./views/datasets.js";
import { renderExperiment } from "./views/experiment.js";
import { renderMonitor } from "./views/monitor.js";
import { renderResults } from "./views/results.js";

const api = new ApiClient();
let teardown: (() => void) | null = null;

function notify(message: string, isError = false): void {
  const banner = document.getElementById("banner")!;
  banner.textContent = message;
  banner.className = isError ? "banner error" : "banner";
  banner.hidden = false;
  setTimeout(() => (banner.hidden = true), 6000);
}

function navigate(hash: string): void {
  window.location.hash = hash;
}

function route(): void {
  const root = document.getElementById("view")!;
  if (teardown) {
    teardown();
    teardown = null;
  }
  const hash = window.location.hash || "#/datasets";
  document.querySelectorAll<HTMLAnchorElement>("nav a").forEach((a) => {
    a.classList.toggle("active", hash.startsWith(a.getAttribute("href") ?? ""));
  });
  const runMatch = hash.match(/^#\/run\/([A-Za-z0-9_-]+)/);
  if (runMatch) {
    teardown = renderMonitor(root, api, runMatch[1]);
  } else if (hash.startsWith("#/experiment")) {
    renderExperiment(root, api, navigate, notify);
  } else if (hash.startsWith("#/results")) {
    renderResults(root, api);
  } else {
    renderDatasets(root, api, notify);
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
