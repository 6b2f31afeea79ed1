"""HTTP control API contract tests (no frontend required)."""

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from newsrec.config import validate_config
from newsrec.corpus import load_corpus, make_planted_corpus, save_corpus
from newsrec.corpus.synthetic import PlantedCorpusSpec
from newsrec.runner import Trainer, read_tracking_file
from newsrec.server import SYNTHETIC_DATASET, Workspace, create_app

TINY = PlantedCorpusSpec(
    num_news=40, num_users=12, train_impressions=30, dev_impressions=8, history_len=5
)

TRAIN_OVERRIDES = {
    "epochs": 1,
    "batch_size": 8,
    "learning_rate": 0.05,
    "embedding_dim": 16,
    "attention_heads": 2,
    "history_len": 5,
    "title_len": 6,
    "negatives": 2,
}


@pytest.fixture()
def workspace(tmp_path):
    ws = Workspace.from_root(tmp_path)
    corpus = make_planted_corpus(TINY)
    save_corpus(corpus, ws.corpus_root / SYNTHETIC_DATASET)
    return ws


@pytest.fixture()
def client(workspace):
    app = create_app(workspace)
    with TestClient(app) as test_client:
        yield test_client
    app.state.manager.shutdown()


def post_train(client, seed=42, **extra_overrides):
    body = {
        "kind": "train",
        "params": {
            "model_name": "nrms_like",
            "dataset": SYNTHETIC_DATASET,
            "seed": seed,
            "overrides": {**TRAIN_OVERRIDES, **extra_overrides},
        },
    }
    return client.post("/api/jobs", json=body)


def wait_for(client, job_id, timeout=120.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        record = client.get(f"/api/jobs/{job_id}").json()
        if record["status"] in ("finished", "failed"):
            return record
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} still {record['status']}")


class TestJobLifecycle:
    def test_train_job_runs_to_completion(self, client):
        response = post_train(client)
        assert response.status_code == 200
        job_id = response.json()["job_id"]
        queued = client.get(f"/api/jobs/{job_id}").json()
        assert queued["status"] in ("queued", "running", "finished")
        record = wait_for(client, job_id)
        assert record["status"] == "finished", record["error"]
        assert record["progress"] == 1.0
        assert record["result"]["epochs"] == 1
        assert record["result"]["best_dev_auc"] is not None

    def test_invalid_parameters_rejected_with_violations(self, client):
        response = post_train(client, batch_size=0)
        assert response.status_code == 422
        body = response.json()
        assert any("batch_size" in v for v in body["violations"])

    def test_unknown_job_not_found(self, client):
        assert client.get("/api/jobs/deadbeef").status_code == 404
        assert client.get("/api/jobs/deadbeef/events").status_code == 404

    def test_unknown_kind_rejected(self, client):
        response = client.post("/api/jobs", json={"kind": "explode", "params": {}})
        assert response.status_code == 400

    def test_two_train_jobs_serialized(self, client):
        first = post_train(client, seed=1).json()["job_id"]
        second = post_train(client, seed=2).json()["job_id"]
        record_second = wait_for(client, second)
        record_first = client.get(f"/api/jobs/{first}").json()
        assert record_first["status"] == "finished"
        assert record_second["status"] == "finished"
        # serialized: second started after first finished updating
        jobs = {j["job_id"]: j for j in client.get("/api/jobs").json()}
        assert jobs[first]["updated"] <= jobs[second]["updated"]

    def test_progress_monotone(self, client):
        job_id = post_train(client, epochs=2).json()["job_id"]
        seen = []
        while True:
            record = client.get(f"/api/jobs/{job_id}").json()
            seen.append(record["progress"])
            if record["status"] in ("finished", "failed"):
                break
            time.sleep(0.02)
        assert seen == sorted(seen)


class TestEventStreaming:
    def collect_stream(self, client, job_id):
        events = []
        with client.stream("GET", f"/api/jobs/{job_id}/events") as response:
            assert response.status_code == 200
            for line in response.iter_lines():
                if line.startswith("data: "):
                    payload = line[len("data: ") :]
                    if payload != "{}":
                        events.append(json.loads(payload))
                if line.startswith("event: end"):
                    break
        return events

    def test_finished_job_streams_full_replay_then_end(self, client, workspace):
        job_id = post_train(client).json()["job_id"]
        record = wait_for(client, job_id)
        events = self.collect_stream(client, job_id)
        tracking = read_tracking_file(record["result"]["run_dir"] + "/tracking.jsonl")
        assert [e.to_json_line() for e in tracking] == [
            json.dumps(e, sort_keys=True) for e in events
        ]
        assert len(events) > 0

    def test_subscriber_before_start_sees_tracking_file_exactly(self, client, workspace):
        job_id = post_train(client, seed=5).json()["job_id"]
        collected = []
        collector = threading.Thread(
            target=lambda: collected.extend(self.collect_stream(client, job_id))
        )
        collector.start()
        record = wait_for(client, job_id)
        collector.join(timeout=30)
        assert not collector.is_alive()
        tracking = read_tracking_file(record["result"]["run_dir"] + "/tracking.jsonl")
        assert [json.dumps(e, sort_keys=True) for e in collected] == [
            e.to_json_line() for e in tracking
        ]


class TestReadOnlyViews:
    def test_datasets_listing(self, client):
        datasets = {d["name"]: d for d in client.get("/api/datasets").json()}
        assert "mind-small" in datasets
        assert datasets[SYNTHETIC_DATASET]["corpus_ready"] is True
        assert datasets["mind-small"]["downloaded"] is False

    def test_models_listing_with_defaults(self, client):
        models = {m["name"]: m for m in client.get("/api/models").json()}
        assert set(models) == {"nrms_like", "gnn_like", "llm_like"}
        assert models["nrms_like"]["defaults"]["epochs"] == 5
        assert "embedding_file" in models["llm_like"]["extras"]

    def test_runs_after_two_trainings(self, client):
        for seed in (7, 8):
            wait_for(client, post_train(client, seed=seed).json()["job_id"])
        runs = client.get("/api/runs").json()
        assert len(runs) == 2
        for run in runs:
            assert run["dev"]["auc"] is not None
            assert run["model_name"] == "nrms_like"

    def test_preprocess_synthetic_job(self, client, workspace):
        out_dir = str(workspace.corpus_root / "fresh-synth")
        job_id = client.post(
            "/api/jobs",
            json={
                "kind": "preprocess",
                "params": {"dataset": SYNTHETIC_DATASET, "out_dir": out_dir, "seed": 3},
            },
        ).json()["job_id"]
        record = wait_for(client, job_id)
        assert record["status"] == "finished"
        assert load_corpus(out_dir).dataset_name == SYNTHETIC_DATASET


class TestApiCliEquivalence:
    def test_train_job_matches_direct_trainer(self, client, workspace, tmp_path):
        job_id = post_train(client, seed=21).json()["job_id"]
        record = wait_for(client, job_id)
        api_result = json.loads(
            (workspace.output_root / "runs" / record["result"]["run_id"] / "result.json").read_text()
        )

        corpus = load_corpus(workspace.corpus_root / SYNTHETIC_DATASET)
        tree = {
            "model_name": "nrms_like",
            "dataset_name": SYNTHETIC_DATASET,
            "corpus_dir": str(workspace.corpus_root / SYNTHETIC_DATASET),
            "output_dir": str(tmp_path / "direct-out"),
            "seed": 21,
            **TRAIN_OVERRIDES,
        }
        trainer = Trainer(validate_config(tree), corpus)
        state = trainer.train()
        direct_result = json.loads((trainer.run_dir / "result.json").read_text())
        for metric in ("auc", "mrr", "ndcg5", "ndcg10"):
            assert api_result["dev"][metric] == pytest.approx(
                direct_result["dev"][metric], abs=1e-6
            )
