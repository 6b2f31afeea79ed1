"""Negative sampling: impressions -> training samples."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from newsrec.corpus.types import PAD_NEWS_ID, ImpressionLog, TrainingSample


@dataclass
class SamplingReport:
    """Counts of impressions that needed special handling."""

    no_negative_impressions: int = 0
    no_positive_impressions: int = 0
    padded_impression_ids: list[str] = field(default_factory=list)


def sample_training_pairs(
    impressions: list[ImpressionLog],
    k: int,
    seed: int,
    history_len: int = 50,
    report: SamplingReport | None = None,
) -> list[TrainingSample]:
    """Build one training sample per positive candidate per impression.

    Each sample pairs the positive with ``k`` negatives drawn uniformly without
    replacement from the same impression's negatives, or with replacement when
    fewer than ``k`` exist. Impressions with zero negatives fall back to the
    reserved ``PAD_NEWS_ID`` (counted in ``report``); impressions with zero
    positives yield no samples (counted too). Histories keep the most recent
    ``history_len`` items and are right-padded with ``PAD_NEWS_ID``.

    Deterministic for a given ``seed``; the number of samples always equals
    the total count of positive labels across the input impressions.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if history_len < 1:
        raise ValueError(f"history_len must be >= 1, got {history_len}")
    rng = random.Random(seed)
    report = report if report is not None else SamplingReport()
    samples: list[TrainingSample] = []
    for imp in impressions:
        positives = imp.positives()
        negatives = imp.negatives()
        if not positives:
            report.no_positive_impressions += 1
            continue
        if not negatives:
            report.no_negative_impressions += 1
            report.padded_impression_ids.append(imp.impression_id)
        history = list(imp.history[-history_len:])
        history.extend([PAD_NEWS_ID] * (history_len - len(history)))
        for pos in positives:
            if not negatives:
                negs = [PAD_NEWS_ID] * k
            elif len(negatives) >= k:
                negs = rng.sample(negatives, k)
            else:
                negs = [rng.choice(negatives) for _ in range(k)]
            samples.append(
                TrainingSample(
                    user_id=imp.user_id,
                    history=tuple(history),
                    positive=pos,
                    negatives=tuple(negs),
                )
            )
    return samples
