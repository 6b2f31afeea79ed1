"""Attention-based recommender: the deep-learning reference model.

News encoder: token embedding -> multi-head self-attention -> additive pool.
User encoder: self-attention over the history's news vectors -> additive pool.
Scoring: inner product. Dropout sits after the embedding and attention stages
and defaults to 0 so evaluation is exactly deterministic.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from newsrec.models.base import Batch, Recommender
from newsrec.models.layers import AdditiveAttention, MultiHeadSelfAttention


class AttentionRecommender(Recommender):
    def __init__(self, vocab_size: int, dim: int, heads: int, dropout: float = 0.0):
        super().__init__()
        self.embedding = nn.Embedding(vocab_size, dim)
        self.news_attention = MultiHeadSelfAttention(dim, heads)
        self.news_pool = AdditiveAttention(dim)
        self.user_attention = MultiHeadSelfAttention(dim, heads)
        self.user_pool = AdditiveAttention(dim)
        self.dropout = nn.Dropout(dropout)

    def encode_news(self, title_ids: torch.Tensor) -> torch.Tensor:
        """[..., T] token ids -> [..., d] news vectors; all-PAD titles -> 0."""
        mask = title_ids != 0
        x = self.dropout(self.embedding(title_ids))
        x = self.dropout(self.news_attention(x, mask))
        return self.news_pool(x, mask)

    def encode_user_from_vectors(self, history: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """[B, H, d] history news vectors -> [B, d]; empty history -> 0."""
        x = self.dropout(self.user_attention(history, mask))
        return self.user_pool(x, mask)

    def encode_candidates(self, batch: Batch) -> torch.Tensor:
        return self.encode_news(batch.cand_titles)

    def encode_user(self, batch: Batch) -> torch.Tensor:
        history = self.encode_news(batch.history_titles)
        return self.encode_user_from_vectors(history, batch.history_mask)
