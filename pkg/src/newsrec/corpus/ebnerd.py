"""Adapter for EB-NeRD-style exports.

The official EB-NeRD release ships parquet tables; this adapter consumes a
plain JSONL export of the same schema so the toolkit stays dependency-light:

- ``articles.jsonl``: one object per article with ``article_id``, ``category_str``,
  ``subcategory_str`` (optional), ``title``, ``subtitle`` (optional, used as the
  abstract text).
- ``behaviors.jsonl``: one object per impression with ``impression_id``,
  ``user_id``, ``impression_time`` (ISO 8601 or epoch seconds),
  ``article_ids_inview`` (candidate list), ``article_ids_clicked`` (subset of
  inview) and optionally ``history`` (ordered clicked article ids).

Labels are derived as membership of a candidate in ``article_ids_clicked``.
The mapping is exercised on synthetic fixtures; converting a real parquet
release to this layout is a five-line pandas script documented in the README.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

from newsrec.corpus.text import tokenize_text
from newsrec.corpus.types import ImpressionLog, NewsItem, ParseReport
from newsrec.errors import CorpusFormatError


def _parse_time(raw) -> int:
    if isinstance(raw, (int, float)):
        return int(raw)
    dt = datetime.fromisoformat(str(raw))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _read_jsonl(path: Path, report: ParseReport):
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError:
                report.reject(str(path), line_no, "corrupt json record")


def parse_ebnerd_articles(file: str | os.PathLike, report: ParseReport | None = None) -> list[NewsItem]:
    path = Path(file)
    if not path.is_file():
        raise CorpusFormatError(f"articles file not found: {path}")
    report = report if report is not None else ParseReport()
    items: list[NewsItem] = []
    for line_no, rec in _read_jsonl(path, report):
        try:
            article_id = str(rec["article_id"])
            title = rec["title"]
        except (KeyError, TypeError):
            report.reject(str(path), line_no, "missing article_id or title")
            continue
        title_tokens = tokenize_text(str(title))
        if not title_tokens:
            report.reject(str(path), line_no, "empty title")
            continue
        items.append(
            NewsItem(
                news_id=article_id,
                category=str(rec.get("category_str", "")),
                subcategory=str(rec.get("subcategory_str", "")),
                title_tokens=tuple(title_tokens),
                abstract_tokens=tuple(tokenize_text(str(rec.get("subtitle", "")))),
                entities=None,
            )
        )
    return items


def parse_ebnerd_behaviors(file: str | os.PathLike, report: ParseReport | None = None) -> list[ImpressionLog]:
    path = Path(file)
    if not path.is_file():
        raise CorpusFormatError(f"behaviors file not found: {path}")
    report = report if report is not None else ParseReport()
    logs: list[ImpressionLog] = []
    for line_no, rec in _read_jsonl(path, report):
        try:
            imp_id = str(rec["impression_id"])
            user_id = str(rec["user_id"])
            timestamp = _parse_time(rec["impression_time"])
            inview = [str(a) for a in rec["article_ids_inview"]]
        except (KeyError, TypeError, ValueError):
            report.reject(str(path), line_no, "missing or unparseable required field")
            continue
        if not inview:
            report.reject(str(path), line_no, "empty candidate list")
            continue
        clicked = {str(a) for a in rec.get("article_ids_clicked", [])}
        history = tuple(str(a) for a in rec.get("history", []))
        candidates = tuple((nid, 1 if nid in clicked else 0) for nid in inview)
        logs.append(
            ImpressionLog(
                impression_id=imp_id,
                user_id=user_id,
                timestamp=timestamp,
                history=history,
                candidates=candidates,
            )
        )
    return logs


class EbnerdAdapter:
    """Unified-corpus adapter for EB-NeRD JSONL exports.

    Layout: ``<raw_dir>/<split>/articles.jsonl`` + ``<raw_dir>/<split>/behaviors.jsonl``
    (articles may also live once at ``<raw_dir>/articles.jsonl`` shared by splits).
    """

    name = "ebnerd"

    def available_splits(self, raw_dir: Path) -> list[str]:
        return [s for s in ("train", "dev", "test") if (raw_dir / s / "behaviors.jsonl").is_file()]

    def read(self, raw_dir: str | os.PathLike, report: ParseReport) -> tuple[list[NewsItem], dict[str, list[ImpressionLog]]]:
        raw_dir = Path(raw_dir)
        splits_present = self.available_splits(raw_dir)
        if not splits_present:
            raise CorpusFormatError(f"no EB-NeRD split directories with behaviors.jsonl under {raw_dir}")
        news: list[NewsItem] = []
        seen: set[str] = set()

        def add_articles(path: Path) -> None:
            for item in parse_ebnerd_articles(path, report):
                if item.news_id not in seen:
                    seen.add(item.news_id)
                    news.append(item)

        shared = raw_dir / "articles.jsonl"
        if shared.is_file():
            add_articles(shared)
        splits: dict[str, list[ImpressionLog]] = {"train": [], "dev": [], "test": []}
        for split in splits_present:
            per_split = raw_dir / split / "articles.jsonl"
            if per_split.is_file():
                add_articles(per_split)
            splits[split] = parse_ebnerd_behaviors(raw_dir / split / "behaviors.jsonl", report)
        return news, splits
