"""Bridge from the unified corpus to model tensors.

Fixes the index spaces shared by every model and the checkpointing code:
news-table row 0 is the reserved PAD news (all-PAD title), user row 0 the
unknown user, and both orderings are sorted so they are reproducible from the
corpus alone.
"""

from __future__ import annotations

import numpy as np
import torch

from newsrec.corpus.text import encode_tokens
from newsrec.corpus.types import PAD_NEWS_ID, ImpressionLog, TrainingSample, UnifiedCorpus
from newsrec.models.base import Batch


class CorpusTensors:
    def __init__(self, corpus: UnifiedCorpus, title_len: int, history_len: int):
        self.title_len = title_len
        self.history_len = history_len
        self.news_ids: list[str] = sorted(corpus.news)
        self.news_row: dict[str, int] = {nid: i for i, nid in enumerate(self.news_ids, start=1)}
        titles = np.zeros((len(self.news_ids) + 1, title_len), dtype=np.int64)
        for nid, row in self.news_row.items():
            titles[row] = encode_tokens(corpus.news[nid].title_tokens, corpus.vocabulary, title_len)
        self.titles = torch.from_numpy(titles)
        self.user_ids: list[str] = sorted({imp.user_id for imp in corpus.splits["train"]})
        self.user_row: dict[str, int] = {uid: i for i, uid in enumerate(self.user_ids, start=1)}

    def _news_rows(self, ids: list[list[str]]) -> torch.Tensor:
        rows = np.array([[self.news_row.get(nid, 0) for nid in seq] for seq in ids], dtype=np.int64)
        return torch.from_numpy(rows)

    def _padded_history(self, history: tuple[str, ...]) -> list[str]:
        kept = list(history[-self.history_len :])
        kept.extend([PAD_NEWS_ID] * (self.history_len - len(kept)))
        return kept

    def _assemble(self, histories: list[list[str]], candidates: list[list[str]], users: list[str]) -> Batch:
        max_c = max(len(c) for c in candidates)
        cand_padded = [c + [PAD_NEWS_ID] * (max_c - len(c)) for c in candidates]
        history_index = self._news_rows(histories)
        cand_index = self._news_rows(cand_padded)
        return Batch(
            history_titles=self.titles[history_index],
            history_index=history_index,
            history_mask=history_index != 0,
            cand_titles=self.titles[cand_index],
            cand_index=cand_index,
            cand_mask=cand_index != 0,
            user_index=torch.tensor([self.user_row.get(u, 0) for u in users], dtype=torch.int64),
        )

    def batch_from_samples(self, samples: list[TrainingSample]) -> Batch:
        """Training batch; candidate column 0 is the positive."""
        return self._assemble(
            histories=[list(s.history) for s in samples],
            candidates=[[s.positive, *s.negatives] for s in samples],
            users=[s.user_id for s in samples],
        )

    def batch_from_impressions(self, impressions: list[ImpressionLog]) -> Batch:
        """Evaluation batch; candidates padded to the widest impression."""
        return self._assemble(
            histories=[self._padded_history(imp.history) for imp in impressions],
            candidates=[[nid for nid, _ in imp.candidates] for imp in impressions],
            users=[imp.user_id for imp in impressions],
        )
