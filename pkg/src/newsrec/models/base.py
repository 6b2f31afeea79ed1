"""Shared model interface and the tensor batch container."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn


@dataclass
class Batch:
    """Tensor view of a batch of training samples or impressions.

    Candidate column 0 holds the positive for training batches. Index 0 in
    ``history_index`` / ``cand_index`` is the reserved PAD news row and index 0
    in ``user_index`` the unknown user.
    """

    history_titles: torch.Tensor  # [B, H, T] int64 token ids
    history_index: torch.Tensor   # [B, H] int64 news-table rows
    history_mask: torch.Tensor    # [B, H] bool, True on real history items
    cand_titles: torch.Tensor     # [B, C, T] int64 token ids
    cand_index: torch.Tensor      # [B, C] int64 news-table rows
    cand_mask: torch.Tensor       # [B, C] bool, True on real candidates
    user_index: torch.Tensor      # [B] int64

    @property
    def size(self) -> int:
        return self.history_titles.shape[0]

    def narrow(self, start: int, count: int) -> "Batch":
        """A shard covering rows [start, start+count)."""
        return Batch(
            history_titles=self.history_titles[start : start + count],
            history_index=self.history_index[start : start + count],
            history_mask=self.history_mask[start : start + count],
            cand_titles=self.cand_titles[start : start + count],
            cand_index=self.cand_index[start : start + count],
            cand_mask=self.cand_mask[start : start + count],
            user_index=self.user_index[start : start + count],
        )


def score_candidates(user: torch.Tensor, candidates: torch.Tensor) -> torch.Tensor:
    """Inner-product click predictor.

    ``user`` is [d] or [B, d]; ``candidates`` is [m, d] or [B, m, d]. Scores
    are bilinear: scaling the user vector scales every score by the same
    factor, which leaves the ranking unchanged.
    """
    if user.shape[-1] != candidates.shape[-1]:
        raise ValueError(
            f"dimension mismatch: user dim {user.shape[-1]} vs candidate dim {candidates.shape[-1]}"
        )
    return (candidates * user.unsqueeze(-2)).sum(dim=-1)


class Recommender(nn.Module):
    """Base class: encode candidates and the user, score by inner product."""

    def encode_candidates(self, batch: Batch) -> torch.Tensor:
        raise NotImplementedError

    def encode_user(self, batch: Batch) -> torch.Tensor:
        raise NotImplementedError

    def forward(self, batch: Batch) -> torch.Tensor:
        """Candidate scores, shape [B, C]."""
        return score_candidates(self.encode_user(batch), self.encode_candidates(batch))
