import random

import pytest

from bokit.consistency import (
    ConsistencyThresholds,
    Decision,
    speaking_rate,
    verify_corpus,
    verify_rates,
)
from bokit.errors import ZeroDurationError, ZeroSyllablesError

SEVERITY = {Decision.ACCEPT: 0, Decision.REVIEW: 1, Decision.REJECT: 2}


class TestSpeakingRate:
    def test_arithmetic(self):
        assert speaking_rate(2.0, 8) == 4.0

    def test_zero_syllables(self):
        with pytest.raises(ZeroSyllablesError):
            speaking_rate(2.0, 0)

    def test_zero_duration(self):
        with pytest.raises(ZeroDurationError):
            speaking_rate(0.0, 5)


class TestVerify:
    def test_identical_rates_all_accept(self):
        verdicts = verify_rates([4.0] * 20)
        assert all(v.decision is Decision.ACCEPT for v in verdicts)
        assert all(v.z_robust == 0.0 for v in verdicts)

    def test_extreme_outlier_rejected(self):
        rates = [3.8, 4.0, 4.2, 3.9, 4.1, 4.0, 3.7, 4.3, 40.0]
        verdicts = verify_rates(rates)
        assert verdicts[-1].decision is Decision.REJECT
        assert all(v.decision is Decision.ACCEPT for v in verdicts[:-1])

    def test_small_corpus_all_review(self):
        verdicts = verify_rates([4.0] * 7)
        assert all(v.decision is Decision.REVIEW for v in verdicts)

    def test_degenerate_mad_never_rejects(self):
        # 99 identical rates: MAD is zero, the outlier is flagged for
        # review rather than auto-rejected on degenerate spread
        verdicts = verify_rates([4.0] * 99 + [40.0])
        assert verdicts[-1].decision is Decision.REVIEW
        assert all(v.decision is Decision.ACCEPT for v in verdicts[:-1])

    def test_reject_implies_z_beyond_review_threshold(self):
        rng = random.Random(1)
        thresholds = ConsistencyThresholds()
        for _ in range(200):
            rates = [rng.uniform(2, 8) for _ in range(rng.randint(8, 40))]
            for v in verify_rates(rates, thresholds):
                if v.decision is Decision.REJECT:
                    assert abs(v.z_robust) > thresholds.review_z

    def test_speaker_grouping_catches_within_speaker_outliers(self):
        # a record extreme for its (slow) speaker but unremarkable against
        # the pooled corpus: only grouped statistics flag it
        a_rates = [1.9, 2.0, 2.1, 2.0, 1.95, 2.05, 2.0, 1.9, 2.1, 2.0, 1.95, 5.0]
        b_rates = [8.0, 8.2, 7.8, 8.0, 8.4, 7.6, 8.1, 7.9, 8.3, 7.7, 8.0, 8.1]
        rates = a_rates + b_rates
        speakers = ["a"] * len(a_rates) + ["b"] * len(b_rates)
        grouped = verify_corpus(rates, speakers)
        assert grouped[11].decision is Decision.REJECT
        pooled = verify_corpus(rates)
        assert pooled[11].decision is Decision.ACCEPT


class TestInvariance:
    def test_scale_invariance_power_of_two(self):
        rng = random.Random(7)
        for _ in range(1000):
            n = rng.randint(8, 32)
            rates = [rng.uniform(1, 10) for _ in range(n)]
            factor = 2.0 ** rng.randint(-3, 3)
            base = [v.decision for v in verify_rates(rates)]
            scaled = [v.decision for v in verify_rates([r * factor for r in rates])]
            assert base == scaled

    def test_scale_invariance_z_values(self):
        rng = random.Random(8)
        for _ in range(200):
            rates = [rng.uniform(1, 10) for _ in range(16)]
            factor = rng.uniform(0.1, 10.0)
            a = verify_rates(rates)
            b = verify_rates([r * factor for r in rates])
            for va, vb in zip(a, b):
                assert va.z_robust == pytest.approx(vb.z_robust, abs=1e-9)

    def test_monotonicity(self):
        rng = random.Random(9)
        for _ in range(1000):
            n = rng.randint(8, 24)
            rates = [rng.uniform(2, 8) for _ in range(n)]
            idx = rng.randrange(n)
            before = verify_rates(rates)[idx].decision
            median = sorted(rates)[n // 2]
            direction = 1.0 if rates[idx] >= median else -1.0
            rates[idx] += direction * rng.uniform(0.5, 30.0)
            after = verify_rates(rates)[idx].decision
            assert SEVERITY[after] >= SEVERITY[before]

    def test_determinism(self):
        rates = [3.3, 4.1, 5.2, 4.4, 4.0, 3.9, 4.6, 4.1, 12.0]
        assert verify_rates(rates) == verify_rates(rates)
