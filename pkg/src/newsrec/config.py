"""Per-model YAML configuration with override layers.

Each model owns a directory: ``<config_root>/<model_name>/default.yaml`` plus
an optional ``<dataset_name>.yaml`` overlay applied automatically. Resolution
order (later wins): built-in defaults < default.yaml < dataset overlay <
programmatic arguments < dotted ``key=value`` overrides.

Keys the toolkit does not know flow into ``model_extras`` instead of erroring,
so new models can define their own knobs without touching this module.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import yaml

from newsrec.errors import (
    ConfigKeyError,
    ConfigNotFoundError,
    ConfigSyntaxError,
    ConfigTypeError,
    ConfigValidationError,
)

logger = logging.getLogger(__name__)

KNOWN_KEYS = {
    "model_name",
    "dataset_name",
    "corpus_dir",
    "output_dir",
    "seed",
    "epochs",
    "batch_size",
    "learning_rate",
    "embedding_dim",
    "attention_heads",
    "history_len",
    "title_len",
    "negatives",
    "dropout",
    "device_plan",
    "tracking",
    "model_extras",
}

DEVICE_PLAN_KINDS = ("single", "simulated_data_parallel")
TRACKING_SINKS = ("file", "null", "memory")


def defaults_tree(model_name: str = "", dataset_name: str = "") -> dict:
    """The documented default for every key."""
    return {
        "model_name": model_name,
        "dataset_name": dataset_name,
        "corpus_dir": f"data/corpora/{dataset_name}" if dataset_name else "",
        "output_dir": "outputs",
        "seed": 42,
        "epochs": 5,
        "batch_size": 64,
        "learning_rate": 1e-3,
        "embedding_dim": 128,
        "attention_heads": 8,
        "history_len": 50,
        "title_len": 30,
        "negatives": 4,
        "dropout": 0.0,
        "device_plan": {"kind": "single", "n_workers": 1},
        "tracking": {"sink": "file", "options": {}},
        "model_extras": {},
    }


class _DuplicateTrackingLoader(yaml.SafeLoader):
    """SafeLoader that records duplicate mapping keys (last value wins)."""

    def __init__(self, stream):
        super().__init__(stream)
        self.duplicates: list[tuple[str, int]] = []

    def construct_mapping(self, node, deep=False):
        mapping = {}
        for key_node, value_node in node.value:
            key = self.construct_object(key_node, deep=deep)
            if key in mapping:
                self.duplicates.append((str(key), key_node.start_mark.line + 1))
            mapping[key] = self.construct_object(value_node, deep=deep)
        return mapping


def _load_yaml_file(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    loader = _DuplicateTrackingLoader(text)
    try:
        data = loader.get_single_data()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        location = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigSyntaxError(f"{location}: {exc}") from exc
    finally:
        loader.dispose()
    for key, line in loader.duplicates:
        logger.warning("%s:%d: duplicate key %r, last value wins", path, line, key)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigSyntaxError(f"{path}: top level must be a mapping, got {type(data).__name__}")
    return data


def _deep_merge(base: dict, overlay: Mapping) -> dict:
    out = dict(base)
    for key, value in overlay.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _normalize(tree: Mapping) -> dict:
    """Route unknown keys into model_extras and expand shorthand values."""
    out: dict[str, Any] = {}
    extras = dict(tree.get("model_extras") or {})
    for key, value in tree.items():
        if key == "model_extras":
            continue
        if key in KNOWN_KEYS:
            out[key] = copy.deepcopy(value)
        else:
            extras[key] = copy.deepcopy(value)
    out["model_extras"] = extras
    if isinstance(out.get("device_plan"), str):
        out["device_plan"] = {"kind": out["device_plan"], "n_workers": 1}
    if isinstance(out.get("tracking"), str):
        out["tracking"] = {"sink": out["tracking"], "options": {}}
    return out


def load_config(model_name: str, config_root: str | os.PathLike, dataset_name: Optional[str] = None) -> dict:
    """Read ``<config_root>/<model_name>/default.yaml`` (+ dataset overlay).

    Returns the raw configuration tree with unknown keys preserved under
    ``model_extras``. Missing directories or files raise naming the expected
    path.
    """
    root = Path(config_root)
    model_dir = root / model_name
    if not model_dir.is_dir():
        raise ConfigNotFoundError(f"no configuration directory for model {model_name!r}: expected {model_dir}/")
    default_path = model_dir / "default.yaml"
    if not default_path.is_file():
        raise ConfigNotFoundError(f"missing default configuration: expected {default_path}")
    tree = _load_yaml_file(default_path)
    if dataset_name:
        overlay_path = model_dir / f"{dataset_name}.yaml"
        if overlay_path.is_file():
            tree = _deep_merge(tree, _load_yaml_file(overlay_path))
    return _normalize(tree)


def _parse_override_scalar(raw: str) -> Any:
    try:
        return yaml.safe_load(raw)
    except yaml.YAMLError:
        return raw


def _coerce(raw: str, base_value: Any, key: str) -> Any:
    """Coerce the override string to the type of the base leaf."""
    if base_value is None:
        return _parse_override_scalar(raw)
    if isinstance(base_value, bool):
        lowered = raw.strip().lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ConfigTypeError(f"{key}: cannot coerce {raw!r} to bool")
    if isinstance(base_value, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigTypeError(f"{key}: cannot coerce {raw!r} to int") from None
    if isinstance(base_value, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigTypeError(f"{key}: cannot coerce {raw!r} to float") from None
    if isinstance(base_value, str):
        return raw
    parsed = _parse_override_scalar(raw)
    if isinstance(base_value, (list, dict)) and not isinstance(parsed, type(base_value)):
        raise ConfigTypeError(f"{key}: cannot coerce {raw!r} to {type(base_value).__name__}")
    return parsed


def merge_overrides(tree: Mapping, overrides: Sequence[str]) -> dict:
    """Apply dotted ``key=value`` overrides in order; later overrides win.

    Overriding a path that does not exist in the tree is an error, except
    under ``model_extras`` where new keys may be created.
    """
    out = copy.deepcopy(dict(tree))
    out.setdefault("model_extras", {})
    for override in overrides:
        if "=" not in override:
            raise ConfigKeyError(f"override {override!r} is not of the form key=value")
        dotted, raw = override.split("=", 1)
        path = dotted.strip().split(".")
        if not all(path):
            raise ConfigKeyError(f"override {override!r} has an empty path segment")
        in_extras = path[0] == "model_extras"
        if len(path) == 1 and path[0] not in out and path[0] not in KNOWN_KEYS:
            # Bare unknown keys land in model_extras, mirroring load_config.
            path = ["model_extras", path[0]]
            in_extras = True
        node = out
        for segment in path[:-1]:
            if segment not in node:
                if in_extras:
                    node[segment] = {}
                else:
                    raise ConfigKeyError(f"unknown configuration path {dotted!r} (no key {segment!r})")
            if not isinstance(node[segment], dict):
                raise ConfigKeyError(f"configuration path {dotted!r} descends into non-mapping {segment!r}")
            node = node[segment]
        leaf = path[-1]
        if leaf in node:
            node[leaf] = _coerce(raw, node[leaf], dotted)
        elif in_extras or (len(path) == 1 and leaf in KNOWN_KEYS):
            defaults = defaults_tree()
            base = defaults.get(leaf) if len(path) == 1 else None
            node[leaf] = _coerce(raw, base, dotted)
        else:
            raise ConfigKeyError(f"unknown configuration path {dotted!r}")
    return out


@dataclass(frozen=True)
class DevicePlan:
    kind: str = "single"
    n_workers: int = 1


@dataclass(frozen=True)
class TrackingSpec:
    sink: str = "file"
    options: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved, validated, immutable experiment configuration."""

    model_name: str
    dataset_name: str
    corpus_dir: str
    output_dir: str
    seed: int
    epochs: int
    batch_size: int
    learning_rate: float
    embedding_dim: int
    attention_heads: int
    history_len: int
    title_len: int
    negatives: int
    dropout: float
    device_plan: DevicePlan
    tracking: TrackingSpec
    model_extras: Mapping[str, Any]

    def to_tree(self) -> dict:
        """Plain-dict form; validate_config(to_tree()) round-trips."""
        return {
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "corpus_dir": self.corpus_dir,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "embedding_dim": self.embedding_dim,
            "attention_heads": self.attention_heads,
            "history_len": self.history_len,
            "title_len": self.title_len,
            "negatives": self.negatives,
            "dropout": self.dropout,
            "device_plan": {"kind": self.device_plan.kind, "n_workers": self.device_plan.n_workers},
            "tracking": {"sink": self.tracking.sink, "options": dict(self.tracking.options)},
            "model_extras": dict(self.model_extras),
        }

    def fingerprint(self) -> str:
        """Stable hash of the resolved configuration."""
        canonical = json.dumps(self.to_tree(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _check_int(tree: dict, key: str, minimum: int, violations: list[str]) -> Optional[int]:
    value = tree.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        violations.append(f"{key}: {value!r} must be an integer")
        return None
    if value < minimum:
        violations.append(f"{key}: {value} violates {key} >= {minimum}")
        return None
    return value


def validate_config(tree: Mapping) -> ExperimentConfig:
    """Check every invariant, fill documented defaults, freeze the result.

    All violations are reported together in one :class:`ConfigValidationError`
    rather than failing at the first.
    """
    normalized = _normalize(tree)
    violations: list[str] = []

    model_name = str(normalized.get("model_name") or "")
    dataset_name = str(normalized.get("dataset_name") or "")
    if not model_name:
        violations.append("model_name: required and non-empty")
    if not dataset_name:
        violations.append("dataset_name: required and non-empty")

    merged = _deep_merge(defaults_tree(model_name, dataset_name), normalized)

    for key in ("corpus_dir", "output_dir"):
        if not isinstance(merged.get(key), str) or not merged[key]:
            violations.append(f"{key}: {merged.get(key)!r} must be a non-empty path")

    seed = _check_int(merged, "seed", minimum=0, violations=violations)
    epochs = _check_int(merged, "epochs", 1, violations)
    batch_size = _check_int(merged, "batch_size", 1, violations)
    embedding_dim = _check_int(merged, "embedding_dim", 1, violations)
    attention_heads = _check_int(merged, "attention_heads", 1, violations)
    history_len = _check_int(merged, "history_len", 1, violations)
    title_len = _check_int(merged, "title_len", 1, violations)
    negatives = _check_int(merged, "negatives", 1, violations)

    learning_rate = merged.get("learning_rate")
    if not isinstance(learning_rate, (int, float)) or isinstance(learning_rate, bool) or learning_rate <= 0:
        violations.append(f"learning_rate: {learning_rate!r} violates learning_rate > 0")

    dropout = merged.get("dropout")
    if not isinstance(dropout, (int, float)) or isinstance(dropout, bool) or not (0.0 <= dropout < 1.0):
        violations.append(f"dropout: {dropout!r} violates 0 <= dropout < 1")

    if embedding_dim and attention_heads and embedding_dim % attention_heads != 0:
        violations.append(
            f"embedding_dim: {embedding_dim} not divisible by attention_heads={attention_heads}"
        )

    plan_tree = merged.get("device_plan")
    plan = DevicePlan()
    if not isinstance(plan_tree, dict):
        violations.append(f"device_plan: {plan_tree!r} must be 'single' or a mapping with kind/n_workers")
    else:
        kind = plan_tree.get("kind", "single")
        n_workers = plan_tree.get("n_workers", 1)
        if kind not in DEVICE_PLAN_KINDS:
            violations.append(f"device_plan.kind: {kind!r} not one of {DEVICE_PLAN_KINDS}")
        if isinstance(n_workers, bool) or not isinstance(n_workers, int) or n_workers < 1:
            violations.append(f"device_plan.n_workers: {n_workers!r} violates n_workers >= 1")
        else:
            plan = DevicePlan(kind=str(kind), n_workers=n_workers)
            if kind == "simulated_data_parallel":
                if batch_size and batch_size % n_workers != 0:
                    violations.append(
                        f"batch_size: {batch_size} not divisible by device_plan.n_workers={n_workers}"
                    )
                if isinstance(dropout, (int, float)) and dropout > 0:
                    violations.append(
                        "dropout: must be 0 with simulated_data_parallel (replica equivalence is exact only without dropout)"
                    )

    tracking_tree = merged.get("tracking")
    tracking = TrackingSpec()
    if not isinstance(tracking_tree, dict):
        violations.append(f"tracking: {tracking_tree!r} must be a sink name or mapping with sink/options")
    else:
        sink = tracking_tree.get("sink", "file")
        options = tracking_tree.get("options", {}) or {}
        if sink not in TRACKING_SINKS:
            violations.append(f"tracking.sink: {sink!r} not one of {TRACKING_SINKS}")
        if not isinstance(options, dict):
            violations.append(f"tracking.options: {options!r} must be a mapping")
        else:
            tracking = TrackingSpec(sink=str(sink), options=options)

    if violations:
        raise ConfigValidationError(violations)

    return ExperimentConfig(
        model_name=model_name,
        dataset_name=dataset_name,
        corpus_dir=merged["corpus_dir"],
        output_dir=merged["output_dir"],
        seed=seed,
        epochs=epochs,
        batch_size=batch_size,
        learning_rate=float(learning_rate),
        embedding_dim=embedding_dim,
        attention_heads=attention_heads,
        history_len=history_len,
        title_len=title_len,
        negatives=negatives,
        dropout=float(dropout),
        device_plan=plan,
        tracking=tracking,
        model_extras=dict(merged.get("model_extras") or {}),
    )


def resolve_config(
    model_name: str,
    config_root: str | os.PathLike,
    dataset_name: Optional[str] = None,
    overrides: Sequence[str] = (),
    **forced: Any,
) -> ExperimentConfig:
    """Full resolution pipeline used by the CLI and the job API.

    ``forced`` entries (for example the corpus directory taken from a CLI
    argument) are applied between the YAML layers and the ``--set`` overrides,
    so explicit dotted overrides still win.
    """
    tree = load_config(model_name, config_root, dataset_name)
    tree["model_name"] = model_name
    if dataset_name:
        tree["dataset_name"] = dataset_name
    for key, value in forced.items():
        if value is not None:
            tree[key] = value
    tree = merge_overrides(tree, overrides)
    return validate_config(tree)
