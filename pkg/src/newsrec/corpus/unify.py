"""Transform raw dataset directories into the unified corpus."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from newsrec.corpus.ebnerd import EbnerdAdapter
from newsrec.corpus.mind import MindAdapter
from newsrec.corpus.text import build_vocabulary
from newsrec.corpus.types import ImpressionLog, NewsItem, ParseReport, UnifiedCorpus
from newsrec.errors import UnknownDatasetError


class DatasetAdapter(Protocol):
    """Reads a raw dataset directory into news items and split impressions."""

    name: str

    def read(self, raw_dir: str | os.PathLike, report: ParseReport) -> tuple[list[NewsItem], dict[str, list[ImpressionLog]]]:
        ...


ADAPTERS: dict[str, DatasetAdapter] = {
    "mind": MindAdapter(),
    "ebnerd": EbnerdAdapter(),
}


def get_adapter(name: str) -> DatasetAdapter:
    try:
        return ADAPTERS[name]
    except KeyError:
        raise UnknownDatasetError(
            f"unknown adapter {name!r}; available: {sorted(ADAPTERS)}"
        ) from None


@dataclass(frozen=True)
class PreprocessOptions:
    """Knobs for corpus construction; defaults suit desk-scale runs."""

    min_token_freq: int = 1
    max_vocab_size: int = 50000


def to_unified_corpus(
    dataset_name: str,
    raw_dir: str | os.PathLike,
    adapter: DatasetAdapter,
    options: PreprocessOptions = PreprocessOptions(),
    report: ParseReport | None = None,
) -> UnifiedCorpus:
    """Parse ``raw_dir`` through ``adapter`` and assemble a UnifiedCorpus.

    Deterministic for identical inputs and options. Parse failures accumulate
    in ``report``; a corpus that fails referential integrity raises naming the
    first offending id.
    """
    report = report if report is not None else ParseReport()
    news_items, splits = adapter.read(raw_dir, report)
    vocab = build_vocabulary(news_items, options.min_token_freq, options.max_vocab_size)
    corpus = UnifiedCorpus(
        dataset_name=dataset_name,
        news={item.news_id: item for item in news_items},
        vocabulary=vocab,
        splits=splits,
    )
    corpus.check_referential_integrity()
    return corpus


def write_parse_report(report: ParseReport, path: str | os.PathLike) -> Path:
    """Persist a parse report as structured text next to the corpus."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    return path
