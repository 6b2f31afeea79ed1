"""On-disk layout of the unified corpus.

One directory per corpus:

- ``meta``: one JSON object (dataset_name, schema_version, counts)
- ``news``: one JSON record per line (id, category, subcategory, title, abstract, entities)
- ``vocab``: ``token<TAB>index`` per line
- ``split_train`` / ``split_dev`` / ``split_test``: one impression JSON per line

Everything is UTF-8 text with ``\\n`` newlines, so corpora diff cleanly and
load(save(c)) reproduces c field-for-field.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from newsrec.corpus.types import (
    SCHEMA_VERSION,
    SPLIT_NAMES,
    ImpressionLog,
    NewsItem,
    UnifiedCorpus,
    Vocabulary,
)
from newsrec.errors import CorpusFormatError, MissingCorpusError, SchemaVersionError


def _news_record(item: NewsItem) -> dict:
    return {
        "id": item.news_id,
        "category": item.category,
        "subcategory": item.subcategory,
        "title": list(item.title_tokens),
        "abstract": list(item.abstract_tokens),
        "entities": list(item.entities) if item.entities is not None else None,
    }


def _impression_record(imp: ImpressionLog) -> dict:
    return {
        "id": imp.impression_id,
        "user": imp.user_id,
        "time": imp.timestamp,
        "history": list(imp.history),
        "candidates": [[nid, label] for nid, label in imp.candidates],
    }


def save_corpus(corpus: UnifiedCorpus, directory: str | os.PathLike) -> Path:
    """Persist ``corpus`` into ``directory`` (created if needed)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "dataset_name": corpus.dataset_name,
        "schema_version": corpus.schema_version,
        "counts": {
            "news": len(corpus.news),
            "vocab": corpus.vocabulary.size,
            **{s: len(corpus.splits[s]) for s in SPLIT_NAMES},
        },
    }
    (directory / "meta").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    with open(directory / "news", "w", encoding="utf-8") as f:
        for nid in sorted(corpus.news):
            f.write(json.dumps(_news_record(corpus.news[nid]), ensure_ascii=False) + "\n")
    with open(directory / "vocab", "w", encoding="utf-8") as f:
        for tok, idx in sorted(corpus.vocabulary.token_to_index.items(), key=lambda kv: kv[1]):
            f.write(f"{tok}\t{idx}\n")
    for split in SPLIT_NAMES:
        with open(directory / f"split_{split}", "w", encoding="utf-8") as f:
            for imp in corpus.splits[split]:
                f.write(json.dumps(_impression_record(imp), ensure_ascii=False) + "\n")
    return directory


def _load_lines(path: Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{line_no}: corrupt record ({exc})") from exc
    return records


def read_corpus_meta(directory: str | os.PathLike) -> dict:
    """Read just the ``meta`` record of a saved corpus (cheap)."""
    meta_path = Path(directory) / "meta"
    if not meta_path.is_file():
        raise MissingCorpusError(f"no corpus found in {directory} (missing 'meta')")
    try:
        return json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"{meta_path}: corrupt meta file ({exc})") from exc


def load_corpus(directory: str | os.PathLike) -> UnifiedCorpus:
    """Load a corpus saved by :func:`save_corpus`."""
    directory = Path(directory)
    meta = read_corpus_meta(directory)
    version = meta.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"corpus in {directory} has schema_version {version}, "
            f"this toolkit reads version {SCHEMA_VERSION}; re-run preprocessing"
        )

    news: dict[str, NewsItem] = {}
    for rec in _load_lines(directory / "news"):
        item = NewsItem(
            news_id=rec["id"],
            category=rec["category"],
            subcategory=rec["subcategory"],
            title_tokens=tuple(rec["title"]),
            abstract_tokens=tuple(rec["abstract"]),
            entities=tuple(rec["entities"]) if rec["entities"] is not None else None,
        )
        news[item.news_id] = item

    token_to_index: dict[str, int] = {}
    vocab_path = directory / "vocab"
    with open(vocab_path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                tok, idx = line.split("\t")
                token_to_index[tok] = int(idx)
            except ValueError as exc:
                raise CorpusFormatError(f"{vocab_path}:{line_no}: corrupt vocab line") from exc

    splits: dict[str, list[ImpressionLog]] = {}
    for split in SPLIT_NAMES:
        splits[split] = [
            ImpressionLog(
                impression_id=rec["id"],
                user_id=rec["user"],
                timestamp=rec["time"],
                history=tuple(rec["history"]),
                candidates=tuple((nid, label) for nid, label in rec["candidates"]),
            )
            for rec in _load_lines(directory / f"split_{split}")
        ]

    return UnifiedCorpus(
        dataset_name=meta["dataset_name"],
        news=news,
        vocabulary=Vocabulary(token_to_index=token_to_index),
        splits=splits,
        schema_version=version,
    )
