"""Graph-based recommender over the user-news click graph.

The graph is bipartite: an undirected edge (user, news) for every click seen
in the training split (history items plus positively labeled candidates).
User vectors come from 1-2 hops of mean-aggregation message passing; candidate
news vectors come from the shared attention news encoder.

Adjacency is kept dense, which is exactly right at desk scale (hundreds of
nodes) and keeps aggregation deterministic; production-size graphs would need
neighbor sampling instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import torch
import torch.nn as nn

from newsrec.corpus.types import ImpressionLog
from newsrec.models.attention import AttentionRecommender
from newsrec.models.base import Batch, Recommender


@dataclass(frozen=True)
class ClickGraph:
    """Bipartite click graph with a fixed, sorted node ordering.

    Nodes are users then news: user i is node i, news j is node
    ``len(user_ids) + j``. Edges are deduplicated (user_pos, news_pos) pairs.
    """

    user_ids: tuple[str, ...]
    news_ids: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def num_nodes(self) -> int:
        return len(self.user_ids) + len(self.news_ids)

    def neighbors(self, node: int) -> list[int]:
        """Sorted neighbor list in combined node indexing."""
        offset = len(self.user_ids)
        if node < offset:
            return sorted(offset + n for u, n in self.edges if u == node)
        return sorted(u for u, n in self.edges if offset + n == node)

    def mean_adjacency(self, dtype: torch.dtype = torch.float32) -> torch.Tensor:
        """Row-normalized dense adjacency: row v averages v's neighbors.

        Isolated nodes get an all-zero row, realizing the zero neighbor mean.
        """
        offset = len(self.user_ids)
        adj = torch.zeros(self.num_nodes, self.num_nodes, dtype=dtype)
        for u, n in self.edges:
            adj[u, offset + n] = 1.0
            adj[offset + n, u] = 1.0
        degree = adj.sum(dim=1, keepdim=True)
        return adj / degree.clamp(min=1.0)


def build_click_graph(impressions: Sequence[ImpressionLog]) -> ClickGraph:
    """Collect (user, news) click edges from labeled impressions.

    A click is any history item or positively labeled candidate. The node
    ordering and edge list are sorted, so construction is deterministic.
    """
    users: set[str] = set()
    news: set[str] = set()
    id_edges: set[tuple[str, str]] = set()
    for imp in impressions:
        users.add(imp.user_id)
        for nid in imp.history:
            news.add(nid)
            id_edges.add((imp.user_id, nid))
        for nid in imp.positives():
            news.add(nid)
            id_edges.add((imp.user_id, nid))
    user_ids = tuple(sorted(users))
    news_ids = tuple(sorted(news))
    user_pos = {uid: i for i, uid in enumerate(user_ids)}
    news_pos = {nid: i for i, nid in enumerate(news_ids)}
    edges = tuple(sorted((user_pos[u], news_pos[n]) for u, n in id_edges))
    return ClickGraph(user_ids=user_ids, news_ids=news_ids, edges=edges)


def aggregate_with_adjacency(
    mean_adj: torch.Tensor,
    embeddings: torch.Tensor,
    hops: int,
    layers: Sequence[nn.Linear],
) -> torch.Tensor:
    """Shared aggregation core: per hop, new(v) = tanh(W [emb(v) || mean_nb(v)])."""
    if hops not in (1, 2):
        raise ValueError(f"hops must be 1 or 2, got {hops}")
    if len(layers) < hops:
        raise ValueError(f"need {hops} hop layers, got {len(layers)}")
    h = embeddings
    for hop in range(hops):
        neighbor_mean = mean_adj.to(h.dtype) @ h
        h = torch.tanh(layers[hop](torch.cat([h, neighbor_mean], dim=-1)))
    return h


def aggregate_neighbors(
    graph: ClickGraph,
    embeddings: torch.Tensor,
    hops: int,
    layers: Sequence[nn.Linear],
) -> torch.Tensor:
    """Mean-aggregation message passing over ``graph``.

    ``embeddings`` is [num_nodes, d] in the graph's combined node ordering;
    isolated nodes see a zero neighbor mean.
    """
    if embeddings.shape[0] != graph.num_nodes:
        raise ValueError(
            f"embeddings rows {embeddings.shape[0]} != graph nodes {graph.num_nodes}"
        )
    return aggregate_with_adjacency(graph.mean_adjacency(embeddings.dtype), embeddings, hops, layers)


class GraphRecommender(Recommender):
    """User vectors from click-graph aggregation, news vectors from text.

    The node set covers every training user plus every corpus news id (news
    unseen in training clicks are isolated nodes). Users outside the training
    split map to a reserved unknown-user embedding at row 0.
    """

    def __init__(
        self,
        vocab_size: int,
        dim: int,
        heads: int,
        graph: ClickGraph,
        num_users: int,
        news_titles: torch.Tensor,
        user_row: dict[str, int],
        news_row: dict[str, int],
        hops: int = 1,
        dropout: float = 0.0,
    ):
        super().__init__()
        if hops not in (1, 2):
            raise ValueError(f"hops must be 1 or 2, got {hops}")
        self.hops = hops
        self.num_users = num_users  # excluding the unknown-user row
        self.text_encoder = AttentionRecommender(vocab_size, dim, heads, dropout)
        self.user_embedding = nn.Embedding(num_users + 1, dim)
        self.hop_layers = nn.ModuleList(nn.Linear(2 * dim, dim, bias=False) for _ in range(hops))
        # [U+1+N+1, T] token ids for every node row; row 0 of each block reserved
        self.register_buffer("node_titles", news_titles, persistent=False)
        self.register_buffer("mean_adj", self._build_adjacency(graph, user_row, news_row), persistent=False)

    def _build_adjacency(self, graph: ClickGraph, user_row: dict[str, int], news_row: dict[str, int]) -> torch.Tensor:
        """Dense mean adjacency over [unknown+users | pad+news] rows."""
        num_news = self.node_titles.shape[0] - 1
        size = (self.num_users + 1) + (num_news + 1)
        offset = self.num_users + 1
        adj = torch.zeros(size, size)
        for u, n in graph.edges:
            ui = user_row.get(graph.user_ids[u], 0)
            ni = news_row.get(graph.news_ids[n], 0)
            if ui == 0 or ni == 0:
                continue
            adj[ui, offset + ni] = 1.0
            adj[offset + ni, ui] = 1.0
        degree = adj.sum(dim=1, keepdim=True)
        return adj / degree.clamp(min=1.0)

    def encode_news(self, title_ids: torch.Tensor) -> torch.Tensor:
        return self.text_encoder.encode_news(title_ids)

    def node_embeddings(self) -> torch.Tensor:
        """Initial embeddings for every node: user table rows, then news text vectors."""
        news_vecs = self.encode_news(self.node_titles)
        return torch.cat([self.user_embedding.weight, news_vecs], dim=0)

    def aggregated_user_vectors(self) -> torch.Tensor:
        """[U+1, d] user vectors after message passing."""
        h = aggregate_with_adjacency(self.mean_adj, self.node_embeddings(), self.hops, self.hop_layers)
        return h[: self.num_users + 1]

    def encode_candidates(self, batch: Batch) -> torch.Tensor:
        return self.encode_news(batch.cand_titles)

    def encode_user(self, batch: Batch) -> torch.Tensor:
        return self.aggregated_user_vectors()[batch.user_index]
