"""Ranking metrics against brute-force reference implementations."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from newsrec.errors import MetricUndefinedError
from newsrec.metrics import (
    auc,
    evaluate_impressions,
    evaluate_prediction_file,
    mrr,
    ndcg_at_k,
    read_prediction_file,
    write_prediction_file,
)

# --- independent brute-force oracles ---------------------------------------


def brute_auc(labels, scores):
    pos = [s for l, s in zip(labels, scores) if l == 1]
    neg = [s for l, s in zip(labels, scores) if l == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def brute_rank_order(labels, scores):
    # descending score, ties by original candidate position
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def brute_mrr(labels, scores):
    for rank, i in enumerate(brute_rank_order(labels, scores), start=1):
        if labels[i] == 1:
            return 1.0 / rank
    raise AssertionError("no positive")


def brute_ndcg(labels, scores, k):
    order = brute_rank_order(labels, scores)
    dcg = sum(
        (2 ** labels[i] - 1) / math.log2(pos + 2) for pos, i in enumerate(order[:k])
    )
    ideal_labels = sorted(labels, reverse=True)
    idcg = sum((2 ** l - 1) / math.log2(pos + 2) for pos, l in enumerate(ideal_labels[:k]))
    return dcg / idcg


def random_impression(rng, max_candidates=50, tie_prone=False):
    n = rng.randint(2, max_candidates)
    labels = [rng.random() < 0.3 for _ in range(n)]
    if not any(labels):
        labels[rng.randrange(n)] = True
    if all(labels):
        labels[rng.randrange(n)] = False
    if tie_prone:
        scores = [rng.choice([0.1, 0.25, 0.5, 0.75]) for _ in range(n)]
    else:
        scores = [rng.random() for _ in range(n)]
    return [1 if l else 0 for l in labels], scores


# --- unit cases --------------------------------------------------------------


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([1, 0], [0.9, 0.1]) == 1.0

    def test_tie_gives_half(self):
        assert auc([1, 0], [0.5, 0.5]) == 0.5

    def test_single_class_signals_skip(self):
        with pytest.raises(MetricUndefinedError):
            auc([1, 1], [0.2, 0.3])
        with pytest.raises(MetricUndefinedError):
            auc([0, 0], [0.2, 0.3])

    def test_matches_bruteforce_with_ties(self):
        rng = random.Random(123)
        for _ in range(300):
            labels, scores = random_impression(rng, max_candidates=20, tie_prone=True)
            assert auc(labels, scores) == pytest.approx(brute_auc(labels, scores), abs=1e-12)


class TestMrr:
    def test_positive_first(self):
        assert mrr([1, 0, 0], [9, 1, 2]) == 1.0

    def test_rank_two(self):
        assert mrr([0, 1, 0], [3, 2, 1]) == 0.5

    def test_tie_broken_by_original_order(self):
        # candidates 0 and 1 tie; candidate 0 (negative) keeps the earlier rank
        assert mrr([0, 1], [0.7, 0.7]) == 0.5
        assert mrr([1, 0], [0.7, 0.7]) == 1.0

    def test_no_positive_signals_skip(self):
        with pytest.raises(MetricUndefinedError):
            mrr([0, 0], [1.0, 2.0])

    def test_matches_bruteforce(self):
        rng = random.Random(7)
        for _ in range(300):
            labels, scores = random_impression(rng, max_candidates=20, tie_prone=True)
            assert mrr(labels, scores) == pytest.approx(brute_mrr(labels, scores), abs=1e-12)


class TestNdcg:
    def test_single_positive_on_top(self):
        assert ndcg_at_k([1, 0, 0], [3, 2, 1], 5) == 1.0

    def test_closed_form_two_candidates(self):
        # positive ranked second: (1/log2(3)) / 1
        expected = 1.0 / math.log2(3.0)
        assert ndcg_at_k([0, 1], [2, 1], 2) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.6309297535714575)

    def test_matches_bruteforce(self):
        rng = random.Random(99)
        for _ in range(300):
            labels, scores = random_impression(rng, max_candidates=15, tie_prone=True)
            for k in (1, 3, 5, 10):
                assert ndcg_at_k(labels, scores, k) == pytest.approx(
                    brute_ndcg(labels, scores, k), abs=1e-12
                )


class TestEvaluateImpressions:
    def test_mean_of_two(self):
        result = evaluate_impressions([([1, 0], [2.0, 1.0]), ([1, 0], [1.0, 2.0])])
        assert result.auc == pytest.approx(0.5)
        assert result.impression_count == 2
        assert result.skipped_count == 0

    def test_all_positive_skips_auc_only(self):
        result = evaluate_impressions([([1, 1], [2.0, 1.0])])
        assert result.auc is None
        assert result.skipped_count == 1
        assert result.mrr == 1.0
        assert result.ndcg5 == 1.0

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            evaluate_impressions([])

    def test_matches_reference_on_1000_random(self):
        rng = random.Random(2024)
        impressions = [random_impression(rng) for _ in range(1000)]
        result = evaluate_impressions(impressions)
        expected_auc = sum(brute_auc(l, s) for l, s in impressions) / len(impressions)
        expected_mrr = sum(brute_mrr(l, s) for l, s in impressions) / len(impressions)
        expected_n5 = sum(brute_ndcg(l, s, 5) for l, s in impressions) / len(impressions)
        expected_n10 = sum(brute_ndcg(l, s, 10) for l, s in impressions) / len(impressions)
        assert result.auc == pytest.approx(expected_auc, abs=1e-9)
        assert result.mrr == pytest.approx(expected_mrr, abs=1e-9)
        assert result.ndcg5 == pytest.approx(expected_n5, abs=1e-9)
        assert result.ndcg10 == pytest.approx(expected_n10, abs=1e-9)

    def test_deterministic(self):
        rng = random.Random(5)
        impressions = [random_impression(rng) for _ in range(50)]
        assert evaluate_impressions(impressions) == evaluate_impressions(impressions)


class TestProperties:
    @staticmethod
    def _metrics(labels, scores):
        return (
            auc(labels, scores),
            mrr(labels, scores),
            ndcg_at_k(labels, scores, 5),
            ndcg_at_k(labels, scores, 10),
        )

    def test_rank_invariance(self):
        rng = random.Random(31)
        for _ in range(100):
            labels, scores = random_impression(rng, max_candidates=20)
            base = self._metrics(labels, scores)
            affine = self._metrics(labels, [2 * s + 1 for s in scores])
            exped = self._metrics(labels, [math.exp(s) for s in scores])
            assert base == pytest.approx(affine, abs=1e-12)
            assert base == pytest.approx(exped, abs=1e-12)

    def test_permutation_covariance_distinct_scores(self):
        rng = random.Random(17)
        for _ in range(100):
            labels, _ = random_impression(rng, max_candidates=15)
            scores = rng.sample(range(1000), len(labels))
            base = self._metrics(labels, scores)
            perm = list(range(len(labels)))
            rng.shuffle(perm)
            shuffled = self._metrics([labels[i] for i in perm], [scores[i] for i in perm])
            assert base == pytest.approx(shuffled, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(data=st.data())
    def test_bounds(self, data):
        n = data.draw(st.integers(min_value=2, max_value=30))
        labels = data.draw(
            st.lists(st.integers(min_value=0, max_value=1), min_size=n, max_size=n)
        )
        scores = data.draw(
            st.lists(
                st.floats(min_value=-100, max_value=100, allow_nan=False),
                min_size=n,
                max_size=n,
            )
        )
        if 0 < sum(labels) < n:
            assert 0.0 <= auc(labels, scores) <= 1.0
        if sum(labels) > 0:
            assert 0.0 < mrr(labels, scores) <= 1.0
            assert 0.0 <= ndcg_at_k(labels, scores, 5) <= 1.0
            assert 0.0 <= ndcg_at_k(labels, scores, 10) <= 1.0


class TestPredictionFile:
    def test_round_trip(self, tmp_path):
        rows = [("I1", [0.5, -1.25, 3.0]), ("I2", [0.125])]
        path = write_prediction_file(tmp_path / "pred.tsv", rows)
        assert read_prediction_file(path) == {"I1": [0.5, -1.25, 3.0], "I2": [0.125]}

    def test_evaluate_prediction_file(self, tmp_path, fixture_corpus):
        dev = fixture_corpus.splits["dev"]
        rows = [(imp.impression_id, list(np.linspace(1, 0, len(imp.candidates)))) for imp in dev]
        path = write_prediction_file(tmp_path / "pred.tsv", rows)
        result = evaluate_prediction_file(path, dev)
        expected = evaluate_impressions(
            [([l for _, l in imp.candidates], scores) for (imp, (_, scores)) in zip(dev, rows)]
        )
        assert result == expected

    def test_missing_impression_rejected(self, tmp_path, fixture_corpus):
        dev = fixture_corpus.splits["dev"]
        path = write_prediction_file(tmp_path / "pred.tsv", [])
        with pytest.raises(ValueError, match=dev[0].impression_id):
            evaluate_prediction_file(path, dev)
