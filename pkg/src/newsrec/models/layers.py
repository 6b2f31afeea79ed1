"""Reusable neural layers: masked attention, additive pooling, embeddings.

All layers share two masking rules:

- masked key positions receive attention weight exactly 0 (not just a large
  negative logit), and
- a row with no unmasked positions produces an all-zero output instead of NaN,
  so cold-start users and all-PAD titles are well defined.
"""

from __future__ import annotations

import math

import torch
import torch.nn as nn


def masked_softmax(scores: torch.Tensor, mask: torch.Tensor, dim: int = -1) -> torch.Tensor:
    """Softmax over the unmasked entries of ``scores``.

    ``mask`` is boolean (True = keep) and broadcastable to ``scores``. Masked
    entries come out exactly 0; rows that are fully masked come out all-zero.
    """
    mask = mask.to(torch.bool)
    any_valid = mask.any(dim=dim, keepdim=True)
    filled = scores.masked_fill(~mask, float("-inf"))
    # Fully masked rows would softmax to NaN; give them finite scores first,
    # then zero the weights below.
    filled = torch.where(any_valid, filled, torch.zeros_like(filled))
    weights = torch.softmax(filled, dim=dim)
    return weights * mask.to(scores.dtype)


def embed_tokens(indices: torch.Tensor, weight: torch.Tensor) -> torch.Tensor:
    """Row lookup: output[..., i, :] = weight[indices[..., i]].

    PAD rows participate like any other; downstream layers mask them out.
    """
    if indices.numel() > 0:
        lo, hi = int(indices.min()), int(indices.max())
        if lo < 0 or hi >= weight.shape[0]:
            raise ValueError(f"token index out of range: [{lo}, {hi}] vs vocabulary size {weight.shape[0]}")
    return nn.functional.embedding(indices, weight)


class MultiHeadSelfAttention(nn.Module):
    """Scaled dot-product self-attention with ``heads`` heads.

    Query/key/value projections are bias-free square maps; heads are split
    from and merged back into the model dimension, so output shape equals
    input shape. Masked query rows are zeroed in the output.
    """

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.dim = dim
        self.heads = heads
        self.head_dim = dim // heads
        self.query = nn.Linear(dim, dim, bias=False)
        self.key = nn.Linear(dim, dim, bias=False)
        self.value = nn.Linear(dim, dim, bias=False)

    def attention_weights(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        """Per-head attention matrices, shape [..., heads, L, L]."""
        *batch, length, _ = x.shape
        q = self.query(x).view(*batch, length, self.heads, self.head_dim).transpose(-3, -2)
        k = self.key(x).view(*batch, length, self.heads, self.head_dim).transpose(-3, -2)
        scores = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)
        key_mask = mask.to(torch.bool).unsqueeze(-2).unsqueeze(-2)
        return masked_softmax(scores, key_mask, dim=-1)

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        *batch, length, _ = x.shape
        attn = self.attention_weights(x, mask)
        v = self.value(x).view(*batch, length, self.heads, self.head_dim).transpose(-3, -2)
        out = (attn @ v).transpose(-3, -2).reshape(*batch, length, self.dim)
        return out * mask.to(out.dtype).unsqueeze(-1)


class AdditiveAttention(nn.Module):
    """Pool a sequence into one vector with learned additive attention.

    Each row is scored by ``query . tanh(W x + b)``; scores softmax over the
    unmasked rows and weight a convex combination of the inputs.
    """

    def __init__(self, dim: int, query_dim: int | None = None):
        super().__init__()
        query_dim = query_dim if query_dim is not None else dim
        self.proj = nn.Linear(dim, query_dim, bias=True)
        self.query = nn.Parameter(torch.empty(query_dim))

    def pool_weights(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        scores = torch.tanh(self.proj(x)) @ self.query
        return masked_softmax(scores, mask.to(torch.bool), dim=-1)

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        weights = self.pool_weights(x, mask)
        return (weights.unsqueeze(-1) * x).sum(dim=-2)


def training_loss(positive: torch.Tensor, negatives: torch.Tensor) -> torch.Tensor:
    """Softmax cross-entropy of the positive against its K sampled negatives.

    ``positive`` has shape [...] and ``negatives`` [..., K]; the result is the
    mean over all leading dimensions. ``logsumexp`` performs max-subtraction,
    so large scores stay finite, and the loss is always >= 0.
    """
    scores = torch.cat([positive.unsqueeze(-1), negatives], dim=-1)
    return (torch.logsumexp(scores, dim=-1) - positive).mean()


def init_parameters(module: nn.Module, seed: int) -> None:
    """Seeded uniform init: every parameter ~ U[-1/sqrt(fan), 1/sqrt(fan)].

    ``fan`` is the last dimension for matrices (fan-in for Linear, embedding
    width for tables) and the length for vectors. Parameters are visited in
    sorted name order so the draw sequence is identical across runs.
    """
    gen = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for _, param in sorted(module.named_parameters(), key=lambda kv: kv[0]):
            fan = param.shape[-1] if param.dim() > 1 else param.shape[0]
            bound = 1.0 / math.sqrt(fan)
            param.uniform_(-bound, bound, generator=gen)
