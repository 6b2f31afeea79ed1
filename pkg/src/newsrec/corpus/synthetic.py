"""Planted-signal synthetic corpus for smoke tests, demos, and acceptance runs.

Each user has one latent preferred category; clicks land on preferred-category
candidates with high probability. Titles are built from disjoint per-category
token pools, so a working model can recover the signal from text alone.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from pathlib import Path

from newsrec.corpus.text import build_vocabulary
from newsrec.corpus.types import ImpressionLog, NewsItem, UnifiedCorpus


@dataclass(frozen=True)
class PlantedCorpusSpec:
    num_news: int = 200
    num_categories: int = 5
    num_users: int = 100
    train_impressions: int = 500
    dev_impressions: int = 100
    candidates_per_impression: int = 5
    preferred_in_candidates: int = 2
    preferred_click_prob: float = 0.9
    other_click_prob: float = 0.05
    history_len: int = 15
    pool_tokens_per_category: int = 30
    seed: int = 13


def _make_news(spec: PlantedCorpusSpec, rng: random.Random) -> list[NewsItem]:
    items = []
    for i in range(spec.num_news):
        cat = i % spec.num_categories
        pool = [f"c{cat}t{j:02d}" for j in range(spec.pool_tokens_per_category)]
        title = [f"cat{cat}"] + rng.sample(pool, 4) + [f"common{rng.randrange(20):02d}"]
        items.append(
            NewsItem(
                news_id=f"N{i:04d}",
                category=f"cat{cat}",
                subcategory=f"cat{cat}sub{i % 3}",
                title_tokens=tuple(title),
                abstract_tokens=(),
            )
        )
    return items


def make_planted_corpus(spec: PlantedCorpusSpec = PlantedCorpusSpec()) -> UnifiedCorpus:
    """Generate the synthetic corpus; deterministic for a given spec."""
    rng = random.Random(spec.seed)
    news = _make_news(spec, rng)
    by_category: dict[int, list[str]] = {}
    for i, item in enumerate(news):
        by_category.setdefault(i % spec.num_categories, []).append(item.news_id)

    users = [f"U{u:03d}" for u in range(spec.num_users)]
    preferred = {uid: u % spec.num_categories for u, uid in enumerate(users)}

    def history_for(uid: str) -> tuple[str, ...]:
        cat = preferred[uid]
        out = []
        for _ in range(spec.history_len):
            if rng.random() < spec.preferred_click_prob:
                out.append(rng.choice(by_category[cat]))
            else:
                out.append(rng.choice(news).news_id)
        return tuple(out)

    histories = {uid: history_for(uid) for uid in users}

    def make_impression(idx: int) -> ImpressionLog:
        uid = rng.choice(users)
        cat = preferred[uid]
        others = [c for c in range(spec.num_categories) if c != cat]
        n_pref = spec.preferred_in_candidates
        cands = rng.sample(by_category[cat], n_pref)
        while len(cands) < spec.candidates_per_impression:
            nid = rng.choice(by_category[rng.choice(others)])
            if nid not in cands:
                cands.append(nid)
        rng.shuffle(cands)
        pref_set = set(by_category[cat])
        while True:  # resample degenerate all-0/all-1 label vectors
            labels = [
                1 if rng.random() < (spec.preferred_click_prob if nid in pref_set else spec.other_click_prob) else 0
                for nid in cands
            ]
            if 0 < sum(labels) < len(labels):
                break
        return ImpressionLog(
            impression_id=f"I{idx:05d}",
            user_id=uid,
            timestamp=1_600_000_000 + idx,
            history=histories[uid],
            candidates=tuple(zip(cands, labels)),
        )

    total = spec.train_impressions + spec.dev_impressions
    impressions = [make_impression(i) for i in range(total)]
    corpus = UnifiedCorpus(
        dataset_name="synthetic-planted",
        news={item.news_id: item for item in news},
        vocabulary=build_vocabulary(news),
        splits={
            "train": impressions[: spec.train_impressions],
            "dev": impressions[spec.train_impressions :],
            "test": [],
        },
    )
    corpus.check_referential_integrity()
    return corpus


def write_category_embeddings(
    corpus: UnifiedCorpus,
    path: str | os.PathLike,
    noise: float = 0.1,
    seed: int = 29,
) -> Path:
    """Write a precomputed-embedding file of one-hot category vectors + noise.

    The vector dimension equals the number of distinct categories; format is
    ``news_id<TAB>v1 v2 ... vd`` per line.
    """
    rng = random.Random(seed)
    categories = sorted({item.category for item in corpus.news.values()})
    cat_index = {c: i for i, c in enumerate(categories)}
    dim = len(categories)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for nid in sorted(corpus.news):
            vec = [rng.gauss(0.0, noise) for _ in range(dim)]
            vec[cat_index[corpus.news[nid].category]] += 1.0
            f.write(nid + "\t" + " ".join(repr(v) for v in vec) + "\n")
    return path
