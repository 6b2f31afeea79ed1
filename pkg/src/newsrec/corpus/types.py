"""Core data types of the unified corpus."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from newsrec.errors import ReferentialIntegrityError

# Current on-disk corpus schema. Bump when the serialized layout changes.
SCHEMA_VERSION = 1

# Reserved news id used to fill negative slots for impressions that have no
# negatives at all. Batch assembly maps it to an all-PAD title.
PAD_NEWS_ID = "<pad_news>"

SPLIT_NAMES = ("train", "dev", "test")


@dataclass(frozen=True)
class NewsItem:
    """One news article after preprocessing.

    ``title_tokens`` is non-empty by construction: parsers reject rows whose
    title tokenizes to nothing.
    """

    news_id: str
    category: str
    subcategory: str
    title_tokens: tuple[str, ...]
    abstract_tokens: tuple[str, ...] = ()
    entities: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class ImpressionLog:
    """One user impression: click history plus a labeled candidate list.

    ``candidates`` pairs each news id with a label in {0, 1}, or ``None`` for
    unlabeled test splits. ``history`` is ordered oldest first.
    """

    impression_id: str
    user_id: str
    timestamp: int
    history: tuple[str, ...]
    candidates: tuple[tuple[str, Optional[int]], ...]

    @property
    def labeled(self) -> bool:
        return all(label is not None for _, label in self.candidates)

    def positives(self) -> list[str]:
        return [nid for nid, label in self.candidates if label == 1]

    def negatives(self) -> list[str]:
        return [nid for nid, label in self.candidates if label == 0]


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-index map with PAD at index 0 and UNK at index 1."""

    token_to_index: dict[str, int]

    PAD = 0
    UNK = 1

    @property
    def size(self) -> int:
        return len(self.token_to_index) + 2

    def index(self, token: str) -> int:
        return self.token_to_index.get(token, self.UNK)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index


@dataclass
class UnifiedCorpus:
    """The normalized dataset shared by every model.

    All three split names exist in ``splits`` (possibly empty lists), and every
    news id referenced from a history or candidate list resolves in ``news``.
    """

    dataset_name: str
    news: dict[str, NewsItem]
    vocabulary: Vocabulary
    splits: dict[str, list[ImpressionLog]]
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        for name in SPLIT_NAMES:
            self.splits.setdefault(name, [])

    def check_referential_integrity(self) -> None:
        """Raise naming the first unresolved news id, if any."""
        for split_name in SPLIT_NAMES:
            for imp in self.splits[split_name]:
                for nid in imp.history:
                    if nid not in self.news:
                        raise ReferentialIntegrityError(
                            f"impression {imp.impression_id} ({split_name}) references "
                            f"unknown news id {nid} in history"
                        )
                for nid, _ in imp.candidates:
                    if nid not in self.news:
                        raise ReferentialIntegrityError(
                            f"impression {imp.impression_id} ({split_name}) references "
                            f"unknown news id {nid} in candidates"
                        )


@dataclass(frozen=True)
class TrainingSample:
    """One positive candidate paired with K sampled negatives.

    ``history`` is already truncated to the most recent H items and right-padded
    with ``PAD_NEWS_ID``. ``user_id`` is carried along because graph-based user
    encoders look users up by identity rather than by history.
    """

    user_id: str
    history: tuple[str, ...]
    positive: str
    negatives: tuple[str, ...]


@dataclass
class ParseReport:
    """Accumulates rejected rows (with reasons) and non-fatal warnings."""

    rejected: list[tuple[str, int, str]] = field(default_factory=list)
    warnings: list[tuple[str, int, str]] = field(default_factory=list)

    def reject(self, file: str, line: int, reason: str) -> None:
        self.rejected.append((file, line, reason))

    def warn(self, file: str, line: int, reason: str) -> None:
        self.warnings.append((file, line, reason))

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)

    def counts_by_reason(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for _, _, reason in self.rejected:
            counts[reason] = counts.get(reason, 0) + 1
        return counts

    def to_dict(self) -> dict:
        return {
            "rejected": [
                {"file": f, "line": ln, "reason": r} for f, ln, r in self.rejected
            ],
            "warnings": [
                {"file": f, "line": ln, "reason": r} for f, ln, r in self.warnings
            ],
            "counts": self.counts_by_reason(),
        }
