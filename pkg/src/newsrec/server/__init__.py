"""HTTP control API backing the web GUI.

Endpoints:

- ``POST /api/jobs``: launch download/preprocess/train/evaluate jobs
- ``GET /api/jobs`` / ``GET /api/jobs/{id}``: job records
- ``GET /api/jobs/{id}/events``: server-sent event stream (replay + live)
- ``GET /api/runs``: recorded runs with final metrics
- ``GET /api/datasets``: dataset availability states
- ``GET /api/models``: model names plus default configurations

Jobs run exactly the same pipeline as the CLI: parameters validate through the
configuration module, training goes through the same Trainer, and events land
in the same tracking file that the stream replays.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, StreamingResponse

from newsrec.config import defaults_tree, load_config, merge_overrides, validate_config
from newsrec.corpus import DATASETS, download_dataset, load_corpus, save_corpus, to_unified_corpus
from newsrec.corpus.store import read_corpus_meta
from newsrec.corpus.synthetic import PlantedCorpusSpec, make_planted_corpus, write_category_embeddings
from newsrec.corpus.types import ParseReport
from newsrec.corpus.unify import PreprocessOptions, get_adapter, write_parse_report
from newsrec.errors import ConfigValidationError, MissingCorpusError, UserInputError
from newsrec.models import MODEL_SPECS, CorpusTensors, build_model
from newsrec.runner import Trainer, evaluate_model, list_runs, load_checkpoint, read_tracking_file
from newsrec.server.jobs import JobHandle, JobManager

SYNTHETIC_DATASET = "synthetic-planted"


@dataclass(frozen=True)
class Workspace:
    """Directory layout the server operates on."""

    root: Path
    config_root: Path
    data_root: Path
    corpus_root: Path
    output_root: Path
    frontend_dist: Path | None

    @staticmethod
    def from_root(root: str | Path) -> "Workspace":
        root = Path(root).resolve()
        dist = root / "frontend" / "dist"
        return Workspace(
            root=root,
            config_root=root / "configs",
            data_root=root / "data" / "raw",
            corpus_root=root / "data" / "corpora",
            output_root=root / "outputs",
            frontend_dist=dist if dist.is_dir() else None,
        )


def _overrides_list(params: dict) -> list[str]:
    raw = params.get("overrides", [])
    if isinstance(raw, dict):
        overrides = [f"{k}={v}" for k, v in raw.items()]
    else:
        overrides = [str(o) for o in raw]
    if params.get("seed") is not None:
        overrides.append(f"seed={params['seed']}")
    return overrides


def resolve_job_config(workspace: Workspace, params: dict):
    """Build and validate the experiment config for a train job."""
    model_name = params.get("model_name")
    if not model_name:
        raise ConfigValidationError(["model_name: required"])
    corpus_dir = params.get("corpus_dir")
    if not corpus_dir and params.get("dataset"):
        corpus_dir = str(workspace.corpus_root / params["dataset"])
    if not corpus_dir:
        raise ConfigValidationError(["corpus_dir: required (or pass dataset)"])
    try:
        dataset_name = read_corpus_meta(corpus_dir)["dataset_name"]
    except MissingCorpusError as exc:
        raise ConfigValidationError([f"corpus_dir: {exc}"]) from exc

    overrides = _overrides_list(params)
    config_root = Path(params.get("config_root") or workspace.config_root)
    if (config_root / model_name / "default.yaml").is_file():
        tree = load_config(model_name, config_root, dataset_name)
    else:
        tree = defaults_tree(model_name, dataset_name)
    tree["model_name"] = model_name
    tree["dataset_name"] = dataset_name
    tree["corpus_dir"] = str(corpus_dir)
    tree["output_dir"] = str(params.get("output_dir") or workspace.output_root)
    tree = merge_overrides(tree, overrides)
    return validate_config(tree)


def _sse(data: str) -> str:
    return f"data: {data}\n\n"


def create_app(workspace: Workspace, manager: JobManager | None = None) -> FastAPI:
    app = FastAPI(title="newsrec control API")
    manager = manager if manager is not None else JobManager()
    app.state.workspace = workspace
    app.state.manager = manager

    @app.exception_handler(ConfigValidationError)
    async def _validation_handler(request, exc: ConfigValidationError):
        return JSONResponse(status_code=422, content={"error": "invalid parameters", "violations": exc.violations})

    @app.exception_handler(UserInputError)
    async def _user_error_handler(request, exc: UserInputError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    # -- job submission ----------------------------------------------------

    def _train_job(params: dict):
        config = resolve_job_config(workspace, params)  # validated pre-queue

        def run(handle: JobHandle) -> dict:
            corpus = load_corpus(config.corpus_dir)
            trainer = Trainer(
                config,
                corpus,
                extra_sink=handle.buffer,
                progress_callback=lambda e, total, _res: handle.set_progress(e / total),
            )
            state = trainer.train()
            trainer.close()
            if state.phase == "failed":
                raise UserInputError("training failed with non-finite loss")
            best = None if state.best_epoch == 0 else state.best_dev_metric
            return {
                "run_id": state.run_id,
                "run_dir": str(trainer.run_dir),
                "epochs": state.epoch,
                "best_dev_auc": best,
            }

        return run

    def _download_job(params: dict):
        dataset = params.get("dataset")
        if dataset not in DATASETS:
            raise UserInputError(f"unknown dataset {dataset!r}; available: {sorted(DATASETS)}")

        def run(handle: JobHandle) -> dict:
            manifest = download_dataset(dataset, workspace.data_root / dataset, params.get("mirror_url"))
            return {
                "dataset": dataset,
                "dir": str(workspace.data_root / dataset),
                "files": len(manifest.entries),
            }

        return run

    def _preprocess_job(params: dict):
        dataset = params.get("dataset")
        if not dataset:
            raise UserInputError("preprocess requires a dataset name")
        out_dir = Path(params.get("out_dir") or workspace.corpus_root / dataset)
        if dataset == SYNTHETIC_DATASET:
            def run_synth(handle: JobHandle) -> dict:
                corpus = make_planted_corpus(PlantedCorpusSpec(seed=int(params.get("seed", 13))))
                save_corpus(corpus, out_dir)
                write_category_embeddings(corpus, out_dir / "embeddings.tsv")
                return {"dataset": dataset, "corpus_dir": str(out_dir), "news": len(corpus.news)}

            return run_synth
        adapter = get_adapter(params.get("adapter") or ("mind" if dataset.startswith("mind") else "ebnerd"))
        raw_dir = Path(params.get("raw_dir") or workspace.data_root / dataset)
        if not raw_dir.is_dir():
            raise UserInputError(f"raw dataset directory not found: {raw_dir}")

        def run(handle: JobHandle) -> dict:
            report = ParseReport()
            corpus = to_unified_corpus(dataset, raw_dir, adapter, PreprocessOptions(), report)
            save_corpus(corpus, out_dir)
            write_parse_report(report, out_dir / "parse_report.json")
            return {
                "dataset": dataset,
                "corpus_dir": str(out_dir),
                "news": len(corpus.news),
                "rejected_rows": report.rejected_count,
            }

        return run

    def _evaluate_job(params: dict):
        checkpoint = params.get("checkpoint")
        split = params.get("split", "dev")
        if not checkpoint or not Path(checkpoint).is_file():
            raise UserInputError(f"checkpoint not found: {checkpoint!r}")
        if split not in ("train", "dev", "test"):
            raise UserInputError(f"split must be train/dev/test, got {split!r}")

        def run(handle: JobHandle) -> dict:
            payload = load_checkpoint(checkpoint)
            config = validate_config(payload["config"])
            corpus = load_corpus(params.get("corpus_dir") or config.corpus_dir)
            tensors = CorpusTensors(corpus, config.title_len, config.history_len)
            model = build_model(config, corpus, tensors)
            model.load_state_dict(payload["model_state"])
            result, _ = evaluate_model(model, corpus.splits[split], tensors, config.batch_size)
            if result is None:
                raise UserInputError(f"split {split!r} is unlabeled")
            return {"split": split, **result.to_dict()}

        return run

    builders = {
        "train": _train_job,
        "download": _download_job,
        "preprocess": _preprocess_job,
        "evaluate": _evaluate_job,
    }

    @app.post("/api/jobs")
    def post_job(body: dict):
        kind = body.get("kind")
        if kind not in builders:
            raise UserInputError(f"kind must be one of {sorted(builders)}, got {kind!r}")
        params = body.get("params") or {}
        run_fn = builders[kind](params)  # validates now, queues after
        job_id = manager.submit(kind, params, run_fn)
        return {"job_id": job_id, "status": "queued"}

    @app.get("/api/jobs")
    def get_jobs():
        return [job.to_dict() for job in manager.list()]

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        record = manager.get(job_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id}")
        return record.to_dict()

    @app.get("/api/jobs/{job_id}/events")
    def stream_events(job_id: str):
        record = manager.get(job_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id}")
        buffer = manager.buffer(job_id)

        def generate():
            if buffer is not None:
                cursor = 0
                while True:
                    events, done = buffer.read_from(cursor, timeout=0.25)
                    for event in events:
                        yield _sse(event.to_json_line())
                    cursor += len(events)
                    if done:
                        break
            else:
                # buffer gone (e.g. server restarted): replay the tracking file
                result = record.result or {}
                tracking = Path(result.get("run_dir", "")) / "tracking.jsonl"
                if tracking.is_file():
                    for event in read_tracking_file(tracking):
                        yield _sse(event.to_json_line())
            yield "event: end\ndata: {}\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    # -- read-only views ----------------------------------------------------

    @app.get("/api/runs")
    def get_runs():
        return list_runs(workspace.output_root)

    @app.get("/api/datasets")
    def get_datasets():
        entries = []
        for name, spec in sorted(DATASETS.items()):
            raw_dir = workspace.data_root / name
            corpus_dir = workspace.corpus_root / name
            entries.append(
                {
                    "name": name,
                    "files": [f.filename for f in spec.files],
                    "notes": spec.notes,
                    "downloaded": (raw_dir / "manifest.json").is_file(),
                    "corpus_ready": (corpus_dir / "meta").is_file(),
                    "corpus_dir": str(corpus_dir),
                }
            )
        synth_dir = workspace.corpus_root / SYNTHETIC_DATASET
        entries.append(
            {
                "name": SYNTHETIC_DATASET,
                "files": [],
                "notes": "generated locally; no download needed",
                "downloaded": True,
                "corpus_ready": (synth_dir / "meta").is_file(),
                "corpus_dir": str(synth_dir),
            }
        )
        return entries

    @app.get("/api/models")
    def get_models():
        models = []
        for name, spec in MODEL_SPECS.items():
            defaults = defaults_tree(name, "")
            config_path = workspace.config_root / name / "default.yaml"
            if config_path.is_file():
                try:
                    defaults.update(load_config(name, workspace.config_root))
                except Exception:
                    pass  # corrupt config dir must not break discovery
            defaults.pop("model_name", None)
            defaults.pop("dataset_name", None)
            defaults.pop("corpus_dir", None)
            models.append(
                {
                    "name": name,
                    "news_encoder": spec.news_encoder,
                    "user_encoder": spec.user_encoder,
                    "scorer": spec.scorer,
                    "extras": list(spec.extras),
                    "defaults": defaults,
                }
            )
        return models

    if workspace.frontend_dist is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=workspace.frontend_dist, html=True), name="webui")

    return app


__all__ = ["Workspace", "create_app", "JobManager", "resolve_job_config", "SYNTHETIC_DATASET"]
