"""Tokenization, vocabulary construction, and token encoding.

Deliberately simple and deterministic: lowercase, split on non-alphanumeric
runs, no stemming or subword units.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable, Sequence

from newsrec.corpus.types import NewsItem, Vocabulary

# Split on runs of anything that is not a (unicode) letter or digit.
# Underscore is not alphanumeric, so it separates tokens too.
_SPLIT = re.compile(r"[\W_]+", re.UNICODE)


def tokenize_text(text: str) -> list[str]:
    """Lowercase ``text`` and split it into alphanumeric tokens.

    >>> tokenize_text("U.S.-China trade")
    ['u', 's', 'china', 'trade']
    """
    return [tok for tok in _SPLIT.split(text.lower()) if tok]


def build_vocabulary(news: Iterable[NewsItem], min_freq: int = 1, max_size: int = 50000) -> Vocabulary:
    """Build a vocabulary over the title and abstract tokens of ``news``.

    Tokens with corpus frequency >= ``min_freq`` are ranked by (frequency
    descending, token ascending) and the top ``max_size - 2`` get indices
    starting at 2; PAD is 0 and UNK is 1. The lexicographic tie-break keeps
    the result identical across platforms.
    """
    if min_freq < 1:
        raise ValueError(f"min_freq must be >= 1, got {min_freq}")
    if max_size < 2:
        raise ValueError(f"max_size must be >= 2, got {max_size}")
    counts: Counter[str] = Counter()
    for item in news:
        counts.update(item.title_tokens)
        counts.update(item.abstract_tokens)
    ranked = sorted(
        (tok for tok, freq in counts.items() if freq >= min_freq),
        key=lambda tok: (-counts[tok], tok),
    )
    kept = ranked[: max_size - 2]
    return Vocabulary(token_to_index={tok: i + 2 for i, tok in enumerate(kept)})


def encode_tokens(tokens: Sequence[str], vocab: Vocabulary, max_len: int) -> list[int]:
    """Map tokens to indices, truncating and right-padding to ``max_len``.

    Out-of-vocabulary tokens map to UNK; padding uses PAD, so PAD indices only
    ever appear as a suffix.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    ids = [vocab.index(tok) for tok in tokens[:max_len]]
    ids.extend([Vocabulary.PAD] * (max_len - len(ids)))
    return ids
