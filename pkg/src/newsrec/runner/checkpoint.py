"""Checkpoint persistence: parameters, optimizer state, and run state."""

from __future__ import annotations

import os
from pathlib import Path

import torch

from newsrec.errors import CheckpointError, FingerprintMismatchError

CHECKPOINT_SCHEMA_VERSION = 1


def save_checkpoint(
    path: str | os.PathLike,
    model: torch.nn.Module,
    optimizer: torch.optim.Optimizer | None,
    run_state_dict: dict,
    config_tree: dict,
    fingerprint: str,
) -> Path:
    """Atomically write a self-describing checkpoint file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "fingerprint": fingerprint,
        "config": config_tree,
        "model_state": model.state_dict(),
        "optimizer_state": optimizer.state_dict() if optimizer is not None else None,
        "run_state": run_state_dict,
    }
    tmp = path.with_name(path.name + ".tmp")
    torch.save(payload, tmp)
    os.replace(tmp, path)
    return path


def load_checkpoint(
    path: str | os.PathLike,
    expected_fingerprint: str | None = None,
    allow_mismatch: bool = False,
) -> dict:
    """Load a checkpoint payload, verifying schema and config fingerprint.

    ``allow_mismatch=True`` overrides the fingerprint check for deliberate
    cross-config loading (e.g. evaluating under a different corpus path).
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=False)
    except Exception as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or "model_state" not in payload:
        raise CheckpointError(f"corrupt checkpoint {path}: unexpected payload")
    version = payload.get("schema_version")
    if version != CHECKPOINT_SCHEMA_VERSION:
        raise CheckpointError(
            f"checkpoint {path} has schema version {version}, expected {CHECKPOINT_SCHEMA_VERSION}"
        )
    if expected_fingerprint is not None and payload.get("fingerprint") != expected_fingerprint:
        if not allow_mismatch:
            raise FingerprintMismatchError(
                f"checkpoint {path} was produced under config fingerprint "
                f"{payload.get('fingerprint')!r}, expected {expected_fingerprint!r} "
                "(pass allow_mismatch to override)"
            )
    return payload
