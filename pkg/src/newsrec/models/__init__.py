"""Model zoo: three reference families behind one interface.

- ``nrms_like``: attention model (token embedding, multi-head self-attention,
  additive pooling for news and user encoders, dot-product scoring)
- ``gnn_like``: mean-aggregation message passing over the user-news click
  graph for user vectors, sharing the attention news encoder
- ``llm_like``: precomputed news text embeddings plus a linear projection,
  with the attention user encoder

New models register by name here; anything a model needs beyond the common
hyperparameters travels in ``config.model_extras``.
"""

from __future__ import annotations

from dataclasses import dataclass

from newsrec.corpus.types import UnifiedCorpus
from newsrec.errors import ConfigValidationError, UserInputError
from newsrec.models.attention import AttentionRecommender
from newsrec.models.base import Batch, Recommender, score_candidates
from newsrec.models.graph import (
    ClickGraph,
    GraphRecommender,
    aggregate_neighbors,
    build_click_graph,
)
from newsrec.models.inputs import CorpusTensors
from newsrec.models.layers import (
    AdditiveAttention,
    MultiHeadSelfAttention,
    embed_tokens,
    init_parameters,
    masked_softmax,
    training_loss,
)
from newsrec.models.llm import (
    CoverageReport,
    EmbeddingTable,
    ProjectedEmbeddingRecommender,
    coverage_report,
    load_precomputed_embeddings,
    save_embedding_table,
)


@dataclass(frozen=True)
class ModelSpec:
    """Descriptive card for one model family (shown by the API and docs)."""

    name: str
    news_encoder: str
    user_encoder: str
    scorer: str = "dot_product"
    extras: tuple[str, ...] = ()


MODEL_SPECS: dict[str, ModelSpec] = {
    "nrms_like": ModelSpec(
        name="nrms_like",
        news_encoder="token_embedding + self_attention + additive_pool",
        user_encoder="self_attention + additive_pool over history",
    ),
    "gnn_like": ModelSpec(
        name="gnn_like",
        news_encoder="token_embedding + self_attention + additive_pool",
        user_encoder="click_graph mean aggregation (1-2 hops)",
        extras=("gnn_hops",),
    ),
    "llm_like": ModelSpec(
        name="llm_like",
        news_encoder="precomputed embedding + linear projection",
        user_encoder="self_attention + additive_pool over history",
        extras=("embedding_file", "embedding_dim_ext"),
    ),
}

MODEL_NAMES = tuple(MODEL_SPECS)


def build_model(config, corpus: UnifiedCorpus, tensors: CorpusTensors) -> Recommender:
    """Construct and seed-initialize the model named by ``config.model_name``."""
    name = config.model_name
    if name == "nrms_like":
        model: Recommender = AttentionRecommender(
            vocab_size=corpus.vocabulary.size,
            dim=config.embedding_dim,
            heads=config.attention_heads,
            dropout=config.dropout,
        )
    elif name == "gnn_like":
        labeled_train = [imp for imp in corpus.splits["train"] if imp.labeled]
        graph = build_click_graph(labeled_train)
        hops = int(config.model_extras.get("gnn_hops", 1))
        model = GraphRecommender(
            vocab_size=corpus.vocabulary.size,
            dim=config.embedding_dim,
            heads=config.attention_heads,
            graph=graph,
            num_users=len(tensors.user_ids),
            news_titles=tensors.titles,
            user_row=tensors.user_row,
            news_row=tensors.news_row,
            hops=hops,
            dropout=config.dropout,
        )
    elif name == "llm_like":
        emb_file = config.model_extras.get("embedding_file")
        if not emb_file:
            raise ConfigValidationError(
                ["model_extras.embedding_file: required for llm_like (path to precomputed news embeddings)"]
            )
        expected = config.model_extras.get("embedding_dim_ext")
        table = load_precomputed_embeddings(emb_file, int(expected) if expected else None)
        model = ProjectedEmbeddingRecommender(
            table=table,
            news_ids=tensors.news_ids,
            dim=config.embedding_dim,
            heads=config.attention_heads,
            dropout=config.dropout,
        )
    else:
        raise UserInputError(f"unknown model {name!r}; available: {sorted(MODEL_NAMES)}")
    init_parameters(model, config.seed)
    return model


__all__ = [
    "Batch",
    "Recommender",
    "CorpusTensors",
    "ModelSpec",
    "MODEL_SPECS",
    "MODEL_NAMES",
    "build_model",
    "score_candidates",
    "masked_softmax",
    "embed_tokens",
    "init_parameters",
    "training_loss",
    "MultiHeadSelfAttention",
    "AdditiveAttention",
    "AttentionRecommender",
    "GraphRecommender",
    "ProjectedEmbeddingRecommender",
    "ClickGraph",
    "build_click_graph",
    "aggregate_neighbors",
    "EmbeddingTable",
    "CoverageReport",
    "coverage_report",
    "load_precomputed_embeddings",
    "save_embedding_table",
]
