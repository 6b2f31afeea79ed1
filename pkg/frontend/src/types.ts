/** Types mirroring the control API's JSON payloads. */

export interface TrackingEvent {
  run_id: string;
  wall_time: number;
  step: number;
  kind: "scalar" | "status" | "artifact";
  name: string;
  value: number | string;
}

export interface JobRecord {
  job_id: string;
  kind: string;
  status: "queued" | "running" | "finished" | "failed";
  progress: number;
  created: number;
  updated: number;
  params: Record<string, unknown>;
  result: Record<string, unknown> | null;
  error: string | null;
}

export interface RunSummary {
  run_id: string;
  model_name: string;
  dataset_name: string;
  status: string;
  seed: number;
  epochs_completed: number;
  best: { metric: string; value: number; epoch: number } | null;
  dev: MetricDict | null;
  test: MetricDict | null;
  run_dir: string;
  tracking_file: string | null;
  best_checkpoint: string | null;
}

export interface MetricDict {
  auc: number | null;
  mrr: number | null;
  ndcg5: number | null;
  ndcg10: number | null;
  impression_count: number;
  skipped_count: number;
}

export interface DatasetInfo {
  name: string;
  files: string[];
  notes: string;
  downloaded: boolean;
  corpus_ready: boolean;
  corpus_dir: string;
}

export interface ModelInfo {
  name: string;
  news_encoder: string;
  user_encoder: string;
  scorer: string;
  extras: string[];
  defaults: Record<string, unknown>;
}
