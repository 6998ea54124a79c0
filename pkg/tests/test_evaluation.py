import itertools
import random

import pytest
from hypothesis import given, strategies as st

from bokit.errors import EmptyReferenceError, OutOfRangeScoreError
from bokit.evaluation import (
    EvalReport,
    EvalRow,
    Rating,
    aggregate_mos,
    corpus_syllable_accuracy,
    edit_counts,
    read_ratings,
    read_transcription_pairs,
    render_report,
    syllable_accuracy,
)

from edit_oracle import oracle_min_edits

ALPHABET = ["ka", "kha", "ga"]


def all_sequences(max_len):
    for n in range(max_len + 1):
        yield from itertools.product(ALPHABET, repeat=n)


class TestEditCounts:
    def test_identical(self):
        counts = edit_counts(["a"] * 10, ["a"] * 10)
        assert (counts.substitutions, counts.deletions, counts.insertions) == (0, 0, 0)

    def test_single_substitution(self):
        ref = list("abcdefghij")
        hyp = list("abXdefghij")
        counts = edit_counts(ref, hyp)
        assert counts.total == 1
        assert counts.substitutions == 1

    def test_empty_hyp_is_all_deletions(self):
        counts = edit_counts(list("abcd"), [])
        assert counts.deletions == 4
        assert counts.total == 4

    def test_empty_ref_is_all_insertions(self):
        counts = edit_counts([], list("abc"))
        assert counts.insertions == 3

    def test_exhaustive_small_against_oracle(self):
        for ref in all_sequences(3):
            for hyp in all_sequences(3):
                assert edit_counts(ref, hyp).total == oracle_min_edits(ref, hyp)

    def test_random_longer_against_oracle(self):
        rng = random.Random(17)
        for _ in range(500):
            ref = [rng.choice(ALPHABET) for _ in range(rng.randint(0, 12))]
            hyp = [rng.choice(ALPHABET) for _ in range(rng.randint(0, 12))]
            assert edit_counts(ref, hyp).total == oracle_min_edits(ref, hyp)


class TestSyllableAccuracy:
    def test_identical_is_100(self):
        assert syllable_accuracy(["x"] * 10, ["x"] * 10) == 100.0

    def test_one_substitution_in_ten_is_90(self):
        ref = list("abcdefghij")
        hyp = list("abXdefghij")
        assert syllable_accuracy(ref, hyp) == 90.0

    def test_full_deletion_is_0(self):
        assert syllable_accuracy(list("abcd"), []) == 0.0

    def test_floored_at_zero(self):
        # insertions can exceed the reference length
        assert syllable_accuracy(["a"], list("xyzw")) == 0.0

    def test_empty_reference(self):
        with pytest.raises(EmptyReferenceError):
            syllable_accuracy([], ["a"])

    def test_100_iff_identical(self):
        rng = random.Random(3)
        for _ in range(300):
            ref = [rng.choice(ALPHABET) for _ in range(rng.randint(1, 8))]
            hyp = [rng.choice(ALPHABET) for _ in range(rng.randint(0, 8))]
            acc = syllable_accuracy(ref, hyp)
            assert 0.0 <= acc <= 100.0
            assert (acc == 100.0) == (ref == hyp)

    def test_pooling_matches_summed_counts(self):
        pairs = [
            (list("abc"), list("abc")),
            (list("abcd"), list("aXcd")),
            (list("ab"), list("abz")),
        ]
        # pooled: N = 9, edits = 0 + 1 + 1
        assert corpus_syllable_accuracy(pairs) == pytest.approx(100 * (1 - 2 / 9))


class TestAggregateMos:
    def test_constant_ratings_reproduce_mean(self):
        ratings = [Rating("sys", f"r{i}", f"u{j}", 4.28)
                   for i in range(10) for j in range(3)]
        out = aggregate_mos(ratings)["sys"]
        assert out.mean == pytest.approx(4.28)
        assert out.ci95 == 0.0
        assert out.n_raters == 10
        assert out.n_utterances == 3

    def test_two_ratings(self):
        out = aggregate_mos([Rating("s", "a", "u", 4), Rating("s", "b", "u", 5)])["s"]
        assert out.mean == 4.5

    def test_single_rating_has_zero_ci(self):
        out = aggregate_mos([Rating("s", "a", "u", 3)])["s"]
        assert out.ci95 == 0.0

    def test_out_of_range_score(self):
        with pytest.raises(OutOfRangeScoreError) as err:
            aggregate_mos([Rating("s", "a", "u1", 6)])
        assert err.value.rater == "a"

    @given(st.lists(st.floats(min_value=1, max_value=5), min_size=2, max_size=30))
    def test_permutation_invariant(self, scores):
        rng = random.Random(0)
        ratings = [Rating("s", f"r{i}", "u", s) for i, s in enumerate(scores)]
        shuffled = ratings[:]
        rng.shuffle(shuffled)
        a = aggregate_mos(ratings)["s"]
        b = aggregate_mos(shuffled)["s"]
        assert a.mean == pytest.approx(b.mean)
        assert a.ci95 == pytest.approx(b.ci95)


TABLE_ROWS = (
    EvalRow("X-API", 3.74, 0.0, 93.8, 10, 20),
    EvalRow("Syllable-based", 4.28, 0.0, 97.6, 10, 20),
    EvalRow("BPE-based", 4.35, 0.0, 96.6, 10, 20),
)


class TestReport:
    def test_columns_and_values(self):
        text = render_report(EvalReport(rows=TABLE_ROWS))
        lines = text.splitlines()
        assert lines[0].split("  ")[0].strip() == "System"
        assert "MOS" in lines[0]
        assert "Syllable Accuracy (%)" in lines[0]
        assert "3.74" in text and "93.8" in text
        assert "4.28" in text and "97.6" in text
        assert "4.35" in text and "96.6" in text

    def test_row_order_preserved(self):
        text = render_report(EvalReport(rows=TABLE_ROWS))
        body = text.splitlines()[2:]
        assert [line.split()[0] for line in body] == [
            "X-API", "Syllable-based", "BPE-based",
        ]

    def test_single_row(self):
        text = render_report(EvalReport(rows=TABLE_ROWS[:1]))
        assert len(text.splitlines()) == 3

    def test_structured_round_trip_lossless(self):
        report = EvalReport(rows=TABLE_ROWS)
        again = EvalReport.from_json(report.to_json())
        assert again.rows == report.rows

    def test_token_stats_attachment_round_trips(self):
        from bokit.tokenizer import TokenStats

        stats = {
            "bpe": TokenStats(
                strategy="bpe", utterances=30, mean_tokens_per_utterance=12.5,
                tokens_per_syllable=1.8, oov_rate=0.0, vocab_coverage=1.0,
            )
        }
        report = EvalReport(rows=TABLE_ROWS, token_stats=stats)
        again = EvalReport.from_json(report.to_json())
        assert again.token_stats == stats

    def test_mos_bounds_enforced(self):
        with pytest.raises(OutOfRangeScoreError):
            EvalRow("bad", 5.4, 0.0, 90.0, 1, 1)
        with pytest.raises(ValueError):
            EvalRow("bad", 4.0, 0.0, 101.0, 1, 1)


class TestFileIngestion:
    def test_ratings_tsv(self, tmp_path):
        path = tmp_path / "ratings.tsv"
        path.write_text(
            "system\trater\tutterance_id\tscore\n"
            "sysA\tr1\tu1\t4\n"
            "sysA\tr2\tu1\t5\n",
            encoding="utf-8",
        )
        ratings = read_ratings(path)
        assert aggregate_mos(ratings)["sysA"].mean == 4.5

    def test_pairs_tsv(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text(
            "utterance_id\tref_text\thyp_text\n"
            "u1\tབཀྲ་ཤིས་བདེ་ལེགས\tབཀྲ་ཤིས་བདེ་ལེགས\n",
            encoding="utf-8",
        )
        pairs = read_transcription_pairs(path)
        assert pairs[0][0] == "u1"
