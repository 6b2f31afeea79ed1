"""Discovery of completed runs under an output directory."""

from __future__ import annotations

import json
import os
from pathlib import Path


def run_dirs(output_root: str | os.PathLike) -> list[Path]:
    root = Path(output_root) / "runs"
    if not root.is_dir():
        return []
    return sorted((d for d in root.iterdir() if d.is_dir()), key=lambda d: d.name)


def read_run_summary(run_dir: str | os.PathLike) -> dict | None:
    """The persisted result of one run, or None when it never finished an epoch."""
    result_path = Path(run_dir) / "result.json"
    if not result_path.is_file():
        return None
    try:
        summary = json.loads(result_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError:
        return None
    summary["run_dir"] = str(run_dir)
    tracking = Path(run_dir) / "tracking.jsonl"
    summary["tracking_file"] = str(tracking) if tracking.is_file() else None
    best_ckpt = Path(run_dir) / "checkpoints" / "best.ckpt"
    summary["best_checkpoint"] = str(best_ckpt) if best_ckpt.is_file() else None
    return summary


def list_runs(output_root: str | os.PathLike) -> list[dict]:
    """Summaries of every recorded run, oldest first; no hidden state."""
    summaries = []
    for run_dir in run_dirs(output_root):
        summary = read_run_summary(run_dir)
        if summary is not None:
            summaries.append(summary)
    return summaries
