"""Recommender backed by precomputed news text embeddings.

The language-model pathway consumes an embedding table produced offline (one
``news_id<TAB>v1 v2 ... vd`` line per news item); the model projects those
vectors into the working dimension and reuses the attention user encoder.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
import torch.nn as nn

from newsrec.models.base import Batch, Recommender
from newsrec.models.layers import AdditiveAttention, MultiHeadSelfAttention
from newsrec.errors import EmbeddingFileError


@dataclass
class EmbeddingTable:
    """Precomputed news vectors, all sharing one dimension."""

    ids: tuple[str, ...]
    vectors: np.ndarray  # [len(ids), dim] float32
    source: str = "precomputed"

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def as_dict(self) -> dict[str, np.ndarray]:
        return {nid: self.vectors[i] for i, nid in enumerate(self.ids)}


@dataclass(frozen=True)
class CoverageReport:
    """How much of a corpus the table covers; missing ids fall back to zeros."""

    total: int
    found: int
    missing: tuple[str, ...]

    @property
    def fraction(self) -> float:
        return self.found / self.total if self.total else 1.0


def load_precomputed_embeddings(file: str | os.PathLike, expected_dim: int | None = None) -> EmbeddingTable:
    """Parse an embedding file; every row must have the same dimension.

    ``expected_dim`` pins the dimension up front; otherwise the first row sets
    it. A row with any other dimension raises naming the row number.
    """
    path = Path(file)
    if not path.is_file():
        raise EmbeddingFileError(f"embedding file not found: {path}")
    ids: list[str] = []
    rows: list[list[float]] = []
    dim = expected_dim
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                nid, raw = line.split("\t")
                values = [float(v) for v in raw.split()]
            except ValueError as exc:
                raise EmbeddingFileError(f"{path}:{line_no}: malformed embedding row") from exc
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise EmbeddingFileError(
                    f"{path}:{line_no}: embedding has dimension {len(values)}, expected {dim}"
                )
            ids.append(nid)
            rows.append(values)
    if not ids:
        raise EmbeddingFileError(f"{path}: no embedding rows")
    return EmbeddingTable(ids=tuple(ids), vectors=np.asarray(rows, dtype=np.float32))


def save_embedding_table(table: EmbeddingTable, file: str | os.PathLike) -> Path:
    path = Path(file)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for i, nid in enumerate(table.ids):
            f.write(nid + "\t" + " ".join(repr(float(v)) for v in table.vectors[i]) + "\n")
    return path


def coverage_report(table: EmbeddingTable, corpus_ids: Sequence[str]) -> CoverageReport:
    have = set(table.ids)
    missing = tuple(sorted(nid for nid in corpus_ids if nid not in have))
    return CoverageReport(total=len(corpus_ids), found=len(corpus_ids) - len(missing), missing=missing)


class ProjectedEmbeddingRecommender(Recommender):
    """Project precomputed news vectors to the model dimension; attention user encoder.

    The projection is bias-free so the reserved PAD news row (a zero vector)
    stays exactly zero, keeping the empty-history rule intact.
    """

    def __init__(
        self,
        table: EmbeddingTable,
        news_ids: Sequence[str],
        dim: int,
        heads: int,
        dropout: float = 0.0,
    ):
        super().__init__()
        lookup = table.as_dict()
        matrix = np.zeros((len(news_ids) + 1, table.dim), dtype=np.float32)
        for i, nid in enumerate(news_ids, start=1):
            if nid in lookup:
                matrix[i] = lookup[nid]
        self.coverage = coverage_report(table, list(news_ids))
        self.register_buffer("news_vectors", torch.from_numpy(matrix), persistent=False)
        self.projection = nn.Linear(table.dim, dim, bias=False)
        self.user_attention = MultiHeadSelfAttention(dim, heads)
        self.user_pool = AdditiveAttention(dim)
        self.dropout = nn.Dropout(dropout)

    def encode_news(self, news_index: torch.Tensor) -> torch.Tensor:
        """[...] news-table rows -> [..., d] projected vectors."""
        return self.projection(self.news_vectors[news_index])

    def encode_candidates(self, batch: Batch) -> torch.Tensor:
        return self.encode_news(batch.cand_index)

    def encode_user(self, batch: Batch) -> torch.Tensor:
        history = self.dropout(self.encode_news(batch.history_index))
        x = self.dropout(self.user_attention(history, batch.history_mask))
        return self.user_pool(x, batch.history_mask)
