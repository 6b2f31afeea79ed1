"""Per-impression ranking metrics: AUC, MRR, nDCG@k.

Conventions match the common news-recommendation benchmark practice:

- AUC counts tied positive/negative pairs as 0.5 (rank-sum formulation);
  impressions with a single label class are skipped, never scored 0.
- MRR and nDCG break score ties by original candidate order (stable sort).
- Aggregation is the unweighted mean over eligible impressions, accumulated
  in input order so results are bit-stable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from newsrec.errors import MetricUndefinedError


def _as_arrays(labels: Sequence[int], scores: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise ValueError(f"labels and scores must be 1-d and equal length, got {y.shape} vs {s.shape}")
    return y, s


def auc(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Probability that a random positive outranks a random negative.

    Computed exactly via the rank-sum formulation with midranks, so each tied
    pair contributes 0.5. Raises :class:`MetricUndefinedError` when labels are
    single-class; callers skip such impressions.
    """
    y, s = _as_arrays(labels, scores)
    if y.size < 2:
        raise ValueError("auc needs at least two candidates")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise MetricUndefinedError("auc undefined for single-class labels")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(y.size, dtype=np.float64)
    sorted_scores = s[order]
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0  # midrank, 1-based
        i = j + 1
    pos_rank_sum = float(ranks[y == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _descending_order(scores: np.ndarray) -> np.ndarray:
    # Stable sort on negated scores keeps original order among ties.
    return np.argsort(-scores, kind="stable")


def mrr(labels: Sequence[int], scores: Sequence[float]) -> float:
    """Reciprocal rank of the highest-ranked positive."""
    y, s = _as_arrays(labels, scores)
    if not (y == 1).any():
        raise MetricUndefinedError("mrr undefined without a positive")
    ordered = y[_descending_order(s)]
    rank = int(np.flatnonzero(ordered == 1)[0]) + 1
    return 1.0 / rank


def ndcg_at_k(labels: Sequence[int], scores: Sequence[float], k: int) -> float:
    """DCG@k with gain 2^label - 1 and log2(position + 1) discount, normalized."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    y, s = _as_arrays(labels, scores)
    if not (y == 1).any():
        raise MetricUndefinedError("ndcg undefined without a positive")
    discounts = 1.0 / np.log2(np.arange(2, k + 2, dtype=np.float64))

    def dcg(ordered: np.ndarray) -> float:
        top = ordered[:k].astype(np.float64)
        return float(((np.power(2.0, top) - 1.0) * discounts[: top.size]).sum())

    actual = dcg(y[_descending_order(s)])
    ideal = dcg(np.sort(y)[::-1])
    return actual / ideal


@dataclass(frozen=True)
class EvalResult:
    """Aggregated metrics for one evaluation pass.

    A metric is ``None`` only when no impression was eligible for it;
    ``skipped_count`` counts impressions excluded from AUC (single-class).
    """

    auc: Optional[float]
    mrr: Optional[float]
    ndcg5: Optional[float]
    ndcg10: Optional[float]
    impression_count: int
    skipped_count: int

    def to_dict(self) -> dict:
        return {
            "auc": self.auc,
            "mrr": self.mrr,
            "ndcg5": self.ndcg5,
            "ndcg10": self.ndcg10,
            "impression_count": self.impression_count,
            "skipped_count": self.skipped_count,
        }

    def summary(self) -> str:
        def fmt(v: Optional[float]) -> str:
            return "n/a" if v is None else f"{v:.4f}"

        return (
            f"auc={fmt(self.auc)} mrr={fmt(self.mrr)} "
            f"ndcg5={fmt(self.ndcg5)} ndcg10={fmt(self.ndcg10)} "
            f"impressions={self.impression_count} skipped={self.skipped_count}"
        )


def evaluate_impressions(pairs: Sequence[tuple[Sequence[int], Sequence[float]]]) -> EvalResult:
    """Unweighted per-impression means over eligible impressions."""
    if not pairs:
        raise ValueError("cannot evaluate an empty impression list")
    auc_vals: list[float] = []
    mrr_vals: list[float] = []
    ndcg5_vals: list[float] = []
    ndcg10_vals: list[float] = []
    skipped = 0
    for labels, scores in pairs:
        try:
            auc_vals.append(auc(labels, scores))
        except MetricUndefinedError:
            skipped += 1
        try:
            mrr_vals.append(mrr(labels, scores))
            ndcg5_vals.append(ndcg_at_k(labels, scores, 5))
            ndcg10_vals.append(ndcg_at_k(labels, scores, 10))
        except MetricUndefinedError:
            pass

    def mean(vals: list[float]) -> Optional[float]:
        return sum(vals) / len(vals) if vals else None

    return EvalResult(
        auc=mean(auc_vals),
        mrr=mean(mrr_vals),
        ndcg5=mean(ndcg5_vals),
        ndcg10=mean(ndcg10_vals),
        impression_count=len(pairs),
        skipped_count=skipped,
    )


def write_prediction_file(path: str | os.PathLike, rows: Iterable[tuple[str, Sequence[float]]]) -> Path:
    """One line per impression: ``impression_id<TAB>score score ...``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for impression_id, scores in rows:
            f.write(impression_id + "\t" + " ".join(repr(float(s)) for s in scores) + "\n")
    return path


def read_prediction_file(path: str | os.PathLike) -> dict[str, list[float]]:
    out: dict[str, list[float]] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            impression_id, raw = line.split("\t")
            out[impression_id] = [float(v) for v in raw.split()]
    return out


def evaluate_prediction_file(path: str | os.PathLike, impressions) -> EvalResult:
    """Score an offline prediction file against a labeled split.

    ``impressions`` are :class:`~newsrec.corpus.types.ImpressionLog` entries;
    scores align to candidates by position.
    """
    predictions = read_prediction_file(path)
    pairs = []
    for imp in impressions:
        if imp.impression_id not in predictions:
            raise ValueError(f"prediction file has no line for impression {imp.impression_id}")
        scores = predictions[imp.impression_id]
        if len(scores) != len(imp.candidates):
            raise ValueError(
                f"impression {imp.impression_id}: {len(scores)} scores for {len(imp.candidates)} candidates"
            )
        labels = [label for _, label in imp.candidates]
        if any(label is None for label in labels):
            raise ValueError(f"impression {imp.impression_id} is unlabeled")
        pairs.append((labels, scores))
    return evaluate_impressions(pairs)
