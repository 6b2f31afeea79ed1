/** Thin typed client over the control API. The client never computes
 * metrics; every number displayed in the GUI originates from a response
 * body or a tracking event. */

import type { DatasetInfo, JobRecord, ModelInfo, RunSummary } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public status: number,
    public violations: string[] = [],
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function request<T>(
  fetchFn: FetchLike,
  url: string,
  init?: RequestInit,
): Promise<T> {
  let response: Response;
  try {
    response = await fetchFn(url, init);
  } catch (err) {
    throw new ApiError(`server unreachable: ${String(err)}`, 0);
  }
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const violations = Array.isArray(body.violations) ? body.violations : [];
    const message =
      typeof body.error === "string"
        ? body.error
        : typeof body.detail === "string"
          ? body.detail
          : `HTTP ${response.status}`;
    throw new ApiError(message, response.status, violations);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  getModels(): Promise<ModelInfo[]> {
    return request(this.fetchFn, `${this.base}/api/models`);
  }

  getDatasets(): Promise<DatasetInfo[]> {
    return request(this.fetchFn, `${this.base}/api/datasets`);
  }

  getRuns(): Promise<RunSummary[]> {
    return request(this.fetchFn, `${this.base}/api/runs`);
  }

  getJob(jobId: string): Promise<JobRecord> {
    return request(this.fetchFn, `${this.base}/api/jobs/${jobId}`);
  }

  getJobs(): Promise<JobRecord[]> {
    return request(this.fetchFn, `${this.base}/api/jobs`);
  }

  postJob(kind: string, params: Record<string, unknown>): Promise<{ job_id: string }> {
    return request(this.fetchFn, `${this.base}/api/jobs`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ kind, params }),
    });
  }

  eventsUrl(jobId: string): string {
    return `${this.base}/api/jobs/${jobId}/events`;
  }
}
