"""Negative sampling contracts."""

import random

import pytest

from newsrec.corpus import PAD_NEWS_ID, ImpressionLog, SamplingReport, sample_training_pairs


def imp(imp_id, user, history, cands):
    return ImpressionLog(imp_id, user, 0, tuple(history), tuple(cands))


class TestSampleTrainingPairs:
    def test_exhaustive_negatives(self):
        impression = imp("I1", "U1", ["N1"], [("P1", 1), ("A", 0), ("B", 0), ("C", 0), ("D", 0)])
        samples = sample_training_pairs([impression], k=4, seed=3, history_len=4)
        assert len(samples) == 1
        assert samples[0].positive == "P1"
        assert sorted(samples[0].negatives) == ["A", "B", "C", "D"]

    def test_replacement_when_too_few(self):
        impression = imp("I1", "U1", [], [("P1", 1), ("P2", 1), ("A", 0)])
        samples = sample_training_pairs([impression], k=2, seed=3, history_len=4)
        assert len(samples) == 2
        for sample in samples:
            assert sample.negatives == ("A", "A")

    def test_zero_negative_falls_back_to_pad_news(self):
        impression = imp("I1", "U1", ["N1"], [("P1", 1), ("P2", 1)])
        report = SamplingReport()
        samples = sample_training_pairs([impression], k=3, seed=0, history_len=2, report=report)
        assert len(samples) == 2
        assert samples[0].negatives == (PAD_NEWS_ID,) * 3
        assert report.no_negative_impressions == 1
        assert report.padded_impression_ids == ["I1"]

    def test_no_positive_impression_yields_nothing(self):
        impression = imp("I1", "U1", [], [("A", 0), ("B", 0)])
        report = SamplingReport()
        assert sample_training_pairs([impression], k=2, seed=0, report=report) == []
        assert report.no_positive_impressions == 1

    def test_history_truncated_to_most_recent_and_padded(self):
        impression = imp("I1", "U1", ["H1", "H2", "H3"], [("P", 1), ("A", 0)])
        samples = sample_training_pairs([impression], k=1, seed=0, history_len=2)
        assert samples[0].history == ("H2", "H3")
        samples = sample_training_pairs([impression], k=1, seed=0, history_len=5)
        assert samples[0].history == ("H1", "H2", "H3", PAD_NEWS_ID, PAD_NEWS_ID)

    def test_determinism_across_runs(self):
        rng = random.Random(11)
        impressions = []
        for i in range(500):
            n_cand = rng.randint(2, 8)
            labels = [rng.random() < 0.4 for _ in range(n_cand)]
            if not any(labels):
                labels[0] = True
            cands = [(f"N{i}_{j}", 1 if lab else 0) for j, lab in enumerate(labels)]
            impressions.append(imp(f"I{i}", f"U{i % 37}", [f"H{i}"], cands))
        first = sample_training_pairs(impressions, k=4, seed=7)
        second = sample_training_pairs(impressions, k=4, seed=7)
        assert first == second
        different = sample_training_pairs(impressions, k=4, seed=8)
        assert first != different

    def test_conservation_of_positive_count(self):
        impressions = [
            imp("I1", "U1", [], [("A", 1), ("B", 0), ("C", 1)]),
            imp("I2", "U2", [], [("D", 1), ("E", 1)]),  # zero negatives
            imp("I3", "U3", [], [("F", 0), ("G", 0)]),  # zero positives
        ]
        samples = sample_training_pairs(impressions, k=2, seed=1)
        total_positives = sum(
            sum(1 for _, label in i.candidates if label == 1) for i in impressions
        )
        assert len(samples) == total_positives == 4

    def test_negatives_only_from_same_impression(self):
        impressions = [
            imp("I1", "U1", [], [("P1", 1), ("A1", 0), ("B1", 0)]),
            imp("I2", "U2", [], [("P2", 1), ("A2", 0), ("B2", 0)]),
        ]
        for sample in sample_training_pairs(impressions, k=2, seed=5):
            suffix = sample.positive[-1]
            assert all(neg.endswith(suffix) for neg in sample.negatives)

    def test_bad_k_rejected(self):
        with pytest.raises(ValueError):
            sample_training_pairs([], k=0, seed=0)
