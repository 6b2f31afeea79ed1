import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, FetchLike } from "../src/api.js";
import { resultsRows } from "../src/views/results.js";
import type { RunSummary } from "../src/types.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("posts jobs and returns the job id", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const fetchFn: FetchLike = async (url, init) => {
      calls.push({ url, init });
      return jsonResponse({ job_id: "abc", status: "queued" });
    };
    const client = new ApiClient("", fetchFn);
    const out = await client.postJob("train", { model_name: "nrms_like" });
    expect(out.job_id).toBe("abc");
    expect(calls[0].url).toBe("/api/jobs");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      kind: "train",
      params: { model_name: "nrms_like" },
    });
  });

  it("surfaces validation violations from 422 responses", async () => {
    const fetchFn: FetchLike = async () =>
      jsonResponse(
        { error: "invalid parameters", violations: ["batch_size: 0 violates batch_size >= 1"] },
        422,
      );
    const client = new ApiClient("", fetchFn);
    const error = await client.postJob("train", {}).catch((e) => e as ApiError);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(422);
    expect((error as ApiError).violations).toHaveLength(1);
  });

  it("wraps network failures as status-0 errors", async () => {
    const fetchFn: FetchLike = async () => {
      throw new TypeError("fetch failed");
    };
    const client = new ApiClient("", fetchFn);
    const error = await client.getRuns().catch((e) => e as ApiError);
    expect((error as ApiError).status).toBe(0);
    expect((error as ApiError).message).toContain("unreachable");
  });

  it("builds the events url for a job", () => {
    expect(new ApiClient("").eventsUrl("j1")).toBe("/api/jobs/j1/events");
  });
});

describe("results table", () => {
  it("renders run summaries verbatim (no client-side computation)", () => {
    const run: RunSummary = {
      run_id: "r1",
      model_name: "nrms_like",
      dataset_name: "synthetic-planted",
      status: "finished",
      seed: 42,
      epochs_completed: 5,
      best: { metric: "auc", value: 0.88, epoch: 4 },
      dev: { auc: 0.88, mrr: 0.9, ndcg5: 0.91, ndcg10: 0.92, impression_count: 100, skipped_count: 0 },
      test: null,
      run_dir: "/x",
      tracking_file: "/x/tracking.jsonl",
      best_checkpoint: null,
    };
    expect(resultsRows([run])).toEqual([
      ["r1", "nrms_like", "synthetic-planted", "finished", "0.8800", "0.9000", "0.9100", "0.9200"],
    ]);
  });

  it("shows a dash for missing metrics", () => {
    const run = {
      run_id: "r2",
      model_name: "m",
      dataset_name: "d",
      status: "failed",
      dev: null,
    } as unknown as RunSummary;
    expect(resultsRows([run])[0].slice(4)).toEqual(["–", "–", "–", "–"]);
  });
});
