"""Render run reports: figures plus delimited metric tables.

Reads a run directory (tracking file + result file) and produces PNG charts
alongside TSV output, so results can be eyeballed and post-processed without
the web GUI. Also builds a cross-run comparison for an output root.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from newsrec.errors import UserInputError
from newsrec.runner import list_runs, read_run_summary, read_tracking_file

METRIC_NAMES = ("auc", "mrr", "ndcg5", "ndcg10")


def _scalar_series(events, name: str) -> tuple[list[int], list[float]]:
    steps, values = [], []
    for event in events:
        if event.kind == "scalar" and event.name == name:
            steps.append(event.step)
            values.append(float(event.value))
    return steps, values


def render_run_report(run_dir: str | os.PathLike, out_dir: str | os.PathLike | None = None) -> list[Path]:
    """Write loss/metric figures and a metrics TSV for one run."""
    run_dir = Path(run_dir)
    tracking_path = run_dir / "tracking.jsonl"
    if not tracking_path.is_file():
        raise UserInputError(f"no tracking file in {run_dir} (expected {tracking_path.name})")
    out_dir = Path(out_dir) if out_dir is not None else run_dir / "report"
    out_dir.mkdir(parents=True, exist_ok=True)
    events = read_tracking_file(tracking_path)
    written: list[Path] = []

    loss_steps, loss_values = _scalar_series(events, "train/loss")
    if loss_values:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        ax.plot(loss_steps, loss_values, marker="o", markersize=3, linewidth=1)
        ax.set_xlabel("step")
        ax.set_ylabel("training loss")
        ax.set_title("Training loss")
        fig.tight_layout()
        path = out_dir / "loss_curve.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    dev_series = {m: _scalar_series(events, f"dev/{m}") for m in METRIC_NAMES}
    if any(values for _, values in dev_series.values()):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        for metric, (steps, values) in dev_series.items():
            if values:
                ax.plot(range(1, len(values) + 1), values, marker="o", markersize=3, label=metric)
        ax.set_xlabel("epoch")
        ax.set_ylabel("dev metric")
        ax.set_ylim(0, 1)
        ax.set_title("Validation metrics per epoch")
        ax.legend()
        fig.tight_layout()
        path = out_dir / "dev_metrics.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    tsv_path = out_dir / "metrics.tsv"
    with open(tsv_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(["epoch", *METRIC_NAMES])
        epochs = max((len(v) for _, v in dev_series.values()), default=0)
        for i in range(epochs):
            row = [i + 1]
            for metric in METRIC_NAMES:
                values = dev_series[metric][1]
                row.append(f"{values[i]:.6f}" if i < len(values) else "")
            writer.writerow(row)
    written.append(tsv_path)

    summary = read_run_summary(run_dir)
    if summary is not None and summary.get("dev"):
        final_path = out_dir / "final_metrics.tsv"
        with open(final_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, delimiter="\t", lineterminator="\n")
            writer.writerow(["metric", "value"])
            for metric in METRIC_NAMES:
                value = summary["dev"].get(metric)
                writer.writerow([metric, "" if value is None else f"{value:.6f}"])
        written.append(final_path)
    return written


def render_comparison_report(output_root: str | os.PathLike, out_dir: str | os.PathLike | None = None) -> list[Path]:
    """Cross-run table and AUC bar chart for every run under ``output_root``."""
    runs = list_runs(output_root)
    if not runs:
        raise UserInputError(f"no recorded runs under {output_root}")
    out_dir = Path(out_dir) if out_dir is not None else Path(output_root) / "report"
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    tsv_path = out_dir / "runs.tsv"
    with open(tsv_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(["run_id", "model", "dataset", "status", *METRIC_NAMES])
        for run in runs:
            dev = run.get("dev") or {}
            writer.writerow(
                [
                    run["run_id"],
                    run.get("model_name", ""),
                    run.get("dataset_name", ""),
                    run.get("status", ""),
                    *[
                        "" if dev.get(m) is None else f"{dev[m]:.6f}"
                        for m in METRIC_NAMES
                    ],
                ]
            )
    written.append(tsv_path)

    labeled = [r for r in runs if (r.get("dev") or {}).get("auc") is not None]
    if labeled:
        fig, ax = plt.subplots(figsize=(max(4, 1.2 * len(labeled)), 3.5))
        names = [f"{r.get('model_name', '?')}\n{r['run_id'][:8]}" for r in labeled]
        values = [r["dev"]["auc"] for r in labeled]
        ax.bar(range(len(labeled)), values)
        ax.set_xticks(range(len(labeled)), names, fontsize=7)
        ax.set_ylabel("dev AUC")
        ax.set_ylim(0, 1)
        ax.set_title("Runs compared by dev AUC")
        fig.tight_layout()
        path = out_dir / "runs_auc.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
