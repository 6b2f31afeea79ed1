"""Dataset acquisition, parsing, and the unified corpus format."""

from newsrec.corpus.types import (
    ImpressionLog,
    NewsItem,
    ParseReport,
    TrainingSample,
    UnifiedCorpus,
    Vocabulary,
    PAD_NEWS_ID,
    SCHEMA_VERSION,
)
from newsrec.corpus.text import build_vocabulary, encode_tokens, tokenize_text
from newsrec.corpus.download import DATASETS, DownloadManifest, download_dataset
from newsrec.corpus.mind import MindAdapter, parse_mind_behaviors, parse_mind_news
from newsrec.corpus.ebnerd import EbnerdAdapter
from newsrec.corpus.store import load_corpus, save_corpus
from newsrec.corpus.unify import ADAPTERS, get_adapter, to_unified_corpus
from newsrec.corpus.sampling import SamplingReport, sample_training_pairs
from newsrec.corpus.synthetic import PlantedCorpusSpec, make_planted_corpus, write_category_embeddings

__all__ = [
    "NewsItem",
    "ImpressionLog",
    "Vocabulary",
    "UnifiedCorpus",
    "TrainingSample",
    "ParseReport",
    "PAD_NEWS_ID",
    "SCHEMA_VERSION",
    "tokenize_text",
    "build_vocabulary",
    "encode_tokens",
    "download_dataset",
    "DownloadManifest",
    "DATASETS",
    "parse_mind_news",
    "parse_mind_behaviors",
    "MindAdapter",
    "EbnerdAdapter",
    "save_corpus",
    "load_corpus",
    "to_unified_corpus",
    "get_adapter",
    "ADAPTERS",
    "sample_training_pairs",
    "SamplingReport",
    "make_planted_corpus",
    "write_category_embeddings",
    "PlantedCorpusSpec",
]
