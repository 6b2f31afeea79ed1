"""Parsers for the MIND tab-separated dataset format.

``news.tsv`` columns: news_id, category, subcategory, title, abstract, url,
title_entities, abstract_entities. ``behaviors.tsv`` columns: impression_id,
user_id, time, history, impressions. Candidate tokens are ``newsid-label``
for labeled splits and bare ``newsid`` for unlabeled test sets.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from newsrec.corpus.text import tokenize_text
from newsrec.corpus.types import ImpressionLog, NewsItem, ParseReport
from newsrec.errors import CorpusFormatError

NEWS_COLUMNS = 8
BEHAVIOR_COLUMNS = 5

# MIND timestamps look like "11/15/2019 8:55:19 AM"; parsed as UTC.
_TIME_FORMAT = "%m/%d/%Y %I:%M:%S %p"


def _parse_entities(raw: str, report: ParseReport, file: str, line_no: int) -> tuple[str, ...]:
    raw = raw.strip()
    if not raw or raw == "[]":
        return ()
    try:
        entries = json.loads(raw)
        return tuple(str(e["WikidataId"]) for e in entries if "WikidataId" in e)
    except (json.JSONDecodeError, TypeError):
        report.warn(file, line_no, "unparseable entity json")
        return ()


def parse_mind_news(file: str | os.PathLike, report: ParseReport | None = None) -> list[NewsItem]:
    """Parse a MIND ``news.tsv`` file into NewsItems.

    Rows with the wrong column count or an empty tokenized title are skipped
    and recorded in ``report``.
    """
    path = Path(file)
    if not path.is_file():
        raise CorpusFormatError(f"news file not found: {path}")
    report = report if report is not None else ParseReport()
    fname = str(path)
    items: list[NewsItem] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != NEWS_COLUMNS:
                report.reject(fname, line_no, f"expected {NEWS_COLUMNS} columns, got {len(cols)}")
                continue
            news_id, category, subcategory, title, abstract, _url, title_ents, abstract_ents = cols
            if not news_id:
                report.reject(fname, line_no, "empty news id")
                continue
            title_tokens = tokenize_text(title)
            if not title_tokens:
                report.reject(fname, line_no, "empty title")
                continue
            entities = _parse_entities(title_ents, report, fname, line_no) + _parse_entities(
                abstract_ents, report, fname, line_no
            )
            items.append(
                NewsItem(
                    news_id=news_id,
                    category=category,
                    subcategory=subcategory,
                    title_tokens=tuple(title_tokens),
                    abstract_tokens=tuple(tokenize_text(abstract)),
                    entities=entities,
                )
            )
    return items


def _parse_timestamp(raw: str) -> int:
    dt = datetime.strptime(raw.strip(), _TIME_FORMAT)
    return int(dt.replace(tzinfo=timezone.utc).timestamp())


def _parse_candidate(token: str) -> tuple[str, Optional[int]]:
    """Split ``newsid-label`` into its parts; bare ids are unlabeled.

    Raises ValueError for labels outside {0, 1}.
    """
    if "-" in token:
        nid, _, label = token.rpartition("-")
        if label not in ("0", "1"):
            raise ValueError(f"label {label!r} outside {{0,1}}")
        return nid, int(label)
    return token, None


def parse_mind_behaviors(
    file: str | os.PathLike, split: str, report: ParseReport | None = None
) -> list[ImpressionLog]:
    """Parse a MIND ``behaviors.tsv`` file into ImpressionLogs.

    History order is preserved (oldest first). Rows with bad labels, empty
    candidate lists, mixed labeled/unlabeled candidates, or unparseable
    timestamps are rejected into ``report``.
    """
    path = Path(file)
    if not path.is_file():
        raise CorpusFormatError(f"behaviors file not found: {path}")
    report = report if report is not None else ParseReport()
    fname = str(path)
    logs: list[ImpressionLog] = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != BEHAVIOR_COLUMNS:
                report.reject(fname, line_no, f"expected {BEHAVIOR_COLUMNS} columns, got {len(cols)}")
                continue
            imp_id, user_id, time_raw, history_raw, impressions_raw = cols
            try:
                timestamp = _parse_timestamp(time_raw)
            except ValueError:
                report.reject(fname, line_no, f"unparseable timestamp {time_raw!r}")
                continue
            history = tuple(history_raw.split())
            cand_tokens = impressions_raw.split()
            if not cand_tokens:
                report.reject(fname, line_no, "empty candidate list")
                continue
            try:
                candidates = tuple(_parse_candidate(tok) for tok in cand_tokens)
            except ValueError as exc:
                report.reject(fname, line_no, str(exc))
                continue
            labeled = [label is not None for _, label in candidates]
            if any(labeled) and not all(labeled):
                report.reject(fname, line_no, "mixed labeled and unlabeled candidates")
                continue
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


class MindAdapter:
    """Adapts raw MIND directories to the unified corpus inputs.

    Expects ``<raw_dir>/<split>/news.tsv`` and ``<raw_dir>/<split>/behaviors.tsv``
    for each split directory present among train/dev/test. mind-small ships
    train and dev only; a missing test directory simply yields an empty split.
    """

    name = "mind"

    def available_splits(self, raw_dir: Path) -> list[str]:
        return [s for s in ("train", "dev", "test") if (raw_dir / s / "behaviors.tsv").is_file()]

    def read(self, raw_dir: str | os.PathLike, report: ParseReport) -> tuple[list[NewsItem], dict[str, list[ImpressionLog]]]:
        raw_dir = Path(raw_dir)
        splits_present = self.available_splits(raw_dir)
        if not splits_present:
            raise CorpusFormatError(f"no MIND split directories with behaviors.tsv under {raw_dir}")
        news: list[NewsItem] = []
        seen: set[str] = set()
        splits: dict[str, list[ImpressionLog]] = {"train": [], "dev": [], "test": []}
        for split in splits_present:
            for item in parse_mind_news(raw_dir / split / "news.tsv", report):
                if item.news_id not in seen:
                    seen.add(item.news_id)
                    news.append(item)
            splits[split] = parse_mind_behaviors(raw_dir / split / "behaviors.tsv", split, report)
        return news, splits
