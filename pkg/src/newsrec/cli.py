"""Command-line entry point.

Subcommands mirror the pipeline phases: download, preprocess, train,
evaluate, predict, report, serve (plus synth for the built-in demo corpus).
Exit codes: 0 success, 1 user error (no stack trace), 2 internal error.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from newsrec.config import resolve_config, validate_config
from newsrec.corpus import (
    download_dataset,
    load_corpus,
    make_planted_corpus,
    save_corpus,
    to_unified_corpus,
    write_category_embeddings,
)
from newsrec.corpus.synthetic import PlantedCorpusSpec
from newsrec.corpus.types import ParseReport
from newsrec.corpus.unify import PreprocessOptions, get_adapter, write_parse_report
from newsrec.errors import NewsrecError, UserInputError
from newsrec.metrics import write_prediction_file
from newsrec.models import CorpusTensors, build_model
from newsrec.runner import Trainer, evaluate_model, load_checkpoint

logger = logging.getLogger(__name__)


def _emit(payload: dict, as_json: bool, human: str) -> None:
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        click.echo(human)


def _guess_adapter(dataset: str) -> str:
    if dataset.startswith("mind"):
        return "mind"
    if dataset.startswith("ebnerd"):
        return "ebnerd"
    raise UserInputError(
        f"cannot infer adapter for dataset {dataset!r}; pass --adapter mind|ebnerd"
    )


@click.group(help="Learner-oriented neural news recommendation toolkit.")
def cli() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@cli.command(help="Download a dataset's archives with hash verification.")
@click.argument("dataset")
@click.option("--dir", "target_dir", default=None, help="Target directory (default data/raw/<dataset>).")
@click.option("--mirror", "mirror_url", default=None, help="Mirror base URL serving the same filenames.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable one-line summary.")
def download(dataset: str, target_dir: str | None, mirror_url: str | None, as_json: bool) -> None:
    target = Path(target_dir) if target_dir else Path("data") / "raw" / dataset
    manifest = download_dataset(dataset, target, mirror_url=mirror_url)
    fetched = sum(1 for e in manifest.entries if e.downloaded)
    _emit(
        {"dataset": dataset, "dir": str(target), "files": len(manifest.entries), "downloaded": fetched},
        as_json,
        f"{dataset}: {len(manifest.entries)} files in {target} ({fetched} newly downloaded)",
    )


@cli.command(help="Transform a raw dataset directory into a unified corpus.")
@click.argument("dataset")
@click.argument("raw_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--adapter", "adapter_name", default=None, help="Dataset adapter (mind or ebnerd); inferred from the dataset name by default.")
@click.option("--min-freq", default=1, show_default=True, help="Minimum token frequency kept in the vocabulary.")
@click.option("--max-vocab", default=50000, show_default=True, help="Maximum vocabulary size including PAD/UNK.")
@click.option("--json", "as_json", is_flag=True)
def preprocess(dataset, raw_dir, out_dir, adapter_name, min_freq, max_vocab, as_json) -> None:
    adapter = get_adapter(adapter_name or _guess_adapter(dataset))
    report = ParseReport()
    corpus = to_unified_corpus(
        dataset, raw_dir, adapter, PreprocessOptions(min_freq, max_vocab), report
    )
    save_corpus(corpus, out_dir)
    report_path = write_parse_report(report, Path(out_dir) / "parse_report.json")
    _emit(
        {
            "dataset": dataset,
            "corpus_dir": str(out_dir),
            "news": len(corpus.news),
            "vocab": corpus.vocabulary.size,
            "splits": {s: len(v) for s, v in corpus.splits.items()},
            "rejected_rows": report.rejected_count,
            "parse_report": str(report_path),
        },
        as_json,
        f"{dataset}: {len(corpus.news)} news, vocab {corpus.vocabulary.size}, "
        f"splits train={len(corpus.splits['train'])} dev={len(corpus.splits['dev'])} "
        f"test={len(corpus.splits['test'])} -> {out_dir} "
        f"({report.rejected_count} rows rejected, see parse_report.json)",
    )


@cli.command(help="Generate the planted-signal demo corpus (plus category embeddings).")
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--seed", default=13, show_default=True)
@click.option("--embeddings", "emb_file", default=None, help="Also write one-hot category embeddings to this file (default <out_dir>/embeddings.tsv).")
@click.option("--json", "as_json", is_flag=True)
def synth(out_dir, seed, emb_file, as_json) -> None:
    corpus = make_planted_corpus(PlantedCorpusSpec(seed=seed))
    save_corpus(corpus, out_dir)
    emb_path = Path(emb_file) if emb_file else Path(out_dir) / "embeddings.tsv"
    write_category_embeddings(corpus, emb_path)
    _emit(
        {"corpus_dir": str(out_dir), "embeddings": str(emb_path), "news": len(corpus.news)},
        as_json,
        f"synthetic corpus in {out_dir} (news={len(corpus.news)}, embeddings at {emb_path})",
    )


def _train_options(fn):
    fn = click.option("--config-root", default="configs", show_default=True, help="Directory of per-model configuration folders.")(fn)
    fn = click.option("--output-dir", default=None, help="Run output root (default from config).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Dotted config override; repeatable, later wins.")(fn)
    fn = click.option("--json", "as_json", is_flag=True)(fn)
    return fn


@cli.command(help="Train a model on a unified corpus.")
@click.argument("model_name")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--resume", "resume_from", default=None, help="Resume from a checkpoint file.")
@click.option("--allow-config-mismatch", is_flag=True, help="Resume even when the checkpoint was produced under a different config fingerprint.")
@_train_options
def train(model_name, corpus_dir, resume_from, allow_config_mismatch, config_root, output_dir, seed, overrides, as_json) -> None:
    corpus = load_corpus(corpus_dir)
    all_overrides = list(overrides) + ([f"seed={seed}"] if seed is not None else [])
    config = resolve_config(
        model_name,
        config_root,
        dataset_name=corpus.dataset_name,
        overrides=all_overrides,
        corpus_dir=str(corpus_dir),
        output_dir=output_dir,
    )
    trainer = Trainer(config, corpus)
    state = trainer.train(resume_from=resume_from, allow_mismatch=allow_config_mismatch)
    trainer.close()
    payload = {
        "run_id": state.run_id,
        "run_dir": str(trainer.run_dir),
        "status": state.phase,
        "epochs": state.epoch,
        "best_dev_auc": None if state.best_epoch == 0 else state.best_dev_metric,
    }
    best = "n/a" if payload["best_dev_auc"] is None else f"{payload['best_dev_auc']:.4f}"
    _emit(payload, as_json, f"run {state.run_id}: {state.phase} after {state.epoch} epochs, best dev auc {best}")
    if state.phase == "failed":
        raise NewsrecError("training failed (non-finite loss); last good checkpoint retained")


def _load_model_from_checkpoint(checkpoint, corpus_dir):
    payload = load_checkpoint(checkpoint)
    config = validate_config(payload["config"])
    corpus = load_corpus(corpus_dir or config.corpus_dir)
    tensors = CorpusTensors(corpus, config.title_len, config.history_len)
    model = build_model(config, corpus, tensors)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, corpus, tensors, config


@cli.command(help="Evaluate a checkpoint on a labeled split.")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("split", type=click.Choice(["train", "dev", "test"]))
@click.option("--corpus-dir", default=None, help="Corpus to evaluate on (default from the checkpoint's config).")
@click.option("--json", "as_json", is_flag=True)
def evaluate(checkpoint, split, corpus_dir, as_json) -> None:
    model, corpus, tensors, config = _load_model_from_checkpoint(checkpoint, corpus_dir)
    impressions = corpus.splits[split]
    result, _ = evaluate_model(model, impressions, tensors, config.batch_size)
    if result is None:
        raise UserInputError(
            f"split {split!r} is unlabeled; use `newsrec predict` to write a prediction file"
        )
    _emit({"split": split, **result.to_dict()}, as_json, result.summary())


@cli.command(help="Score a split and write a prediction file.")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("split", type=click.Choice(["train", "dev", "test"]))
@click.argument("out_file", type=click.Path(dir_okay=False))
@click.option("--corpus-dir", default=None)
@click.option("--json", "as_json", is_flag=True)
def predict(checkpoint, split, out_file, corpus_dir, as_json) -> None:
    model, corpus, tensors, config = _load_model_from_checkpoint(checkpoint, corpus_dir)
    impressions = corpus.splits[split]
    _, rows = evaluate_model(model, impressions, tensors, config.batch_size)
    path = write_prediction_file(out_file, rows)
    _emit(
        {"split": split, "impressions": len(rows), "file": str(path)},
        as_json,
        f"wrote {len(rows)} impression scores to {path}",
    )


@cli.command(help="Render figures and TSV tables for a run (or compare all runs).")
@click.argument("path", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", default=None, help="Report directory (default <path>/report).")
@click.option("--json", "as_json", is_flag=True)
def report(path, out_dir, as_json) -> None:
    from newsrec.report import render_comparison_report, render_run_report

    base = Path(path)
    if (base / "tracking.jsonl").is_file():
        written = render_run_report(base, out_dir)
    elif (base / "runs").is_dir():
        written = render_comparison_report(base, out_dir)
    else:
        raise UserInputError(
            f"{base} is neither a run directory (tracking.jsonl) nor an output root (runs/)"
        )
    _emit(
        {"files": [str(p) for p in written]},
        as_json,
        "wrote:\n" + "\n".join(f"  {p}" for p in written),
    )


@cli.command(help="Serve the control API (and the web GUI when built).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--workdir", default=".", show_default=True, help="Workspace root holding configs/, data/, outputs/.")
@click.option("--frontend", "frontend_dist", default=None, help="Static GUI bundle to serve at / (default <workdir>/frontend/dist).")
def serve(host, port, workdir, frontend_dist) -> None:
    import dataclasses

    import uvicorn

    from newsrec.server import Workspace, create_app

    workspace = Workspace.from_root(workdir)
    if frontend_dist is not None:
        dist = Path(frontend_dist)
        if not dist.is_dir():
            raise UserInputError(f"frontend bundle directory not found: {dist}")
        workspace = dataclasses.replace(workspace, frontend_dist=dist)
    app = create_app(workspace)
    uvicorn.run(app, host=host, port=port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except UserInputError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except NewsrecError as exc:
        click.echo(f"internal error: {exc}", err=True)
        return 2
    except Exception as exc:  # pragma: no cover - last-resort guard
        logger.exception("unhandled failure")
        click.echo(f"internal error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
