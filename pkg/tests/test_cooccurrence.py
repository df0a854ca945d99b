"""Co-occurrence counting, smoothed association scores, and the gate."""

from __future__ import annotations

import math

import pytest

from bitextaug import (
    CandidatePair,
    EmptyCorpus,
    GeneratedVariant,
    IoError,
    StopwordSet,
    association_score,
    build_matrix,
    cooc_gate,
    load_matrix,
    save_matrix,
)

from conftest import corpus_from_pairs
from oracle_helpers import cooc_counts_oracle, pmi_oracle


def _counts_by_word(matrix):
    by_source = {i: w for w, i in matrix.vocab_source.items()}
    by_target = {j: w for w, j in matrix.vocab_target.items()}
    return {
        (by_source[i], by_target[j]): c for (i, j), c in matrix.counts.items()
    }


def _variant(text, replacement):
    return GeneratedVariant(
        text=text,
        parent_pair_id="0",
        side="source",
        site=None,
        replacement=replacement,
        model_prob=0.5 if replacement else 1.0,
        is_original=replacement is None,
    )


def _candidate(src_rep, tgt_rep):
    return CandidatePair(
        source_variant=_variant("s text", src_rep),
        target_variant=_variant("t text", tgt_rep),
        similarity=0.9,
    )


class TestBuildMatrix:
    def test_single_pair_counts(self):
        matrix = build_matrix(corpus_from_pairs([("a b", "x")]))
        assert _counts_by_word(matrix) == {("a", "x"): 1, ("b", "x"): 1}
        assert matrix.pair_total == 2

    def test_reference_corpus_counts(self):
        matrix = build_matrix(corpus_from_pairs([("a b", "x"), ("a c", "x y")]))
        assert _counts_by_word(matrix) == {
            ("a", "x"): 2,
            ("a", "y"): 1,
            ("b", "x"): 1,
            ("c", "x"): 1,
            ("c", "y"): 1,
        }
        assert matrix.pair_total == 6

    def test_matches_oracle_counts(self):
        pairs = [
            ("the cat sat", "le chat"),
            ("the dog ran", "le chien"),
            ("a cat and a dog", "un chat et un chien"),
        ]
        matrix = build_matrix(corpus_from_pairs(pairs))
        assert _counts_by_word(matrix) == cooc_counts_oracle(pairs)

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            build_matrix(corpus_from_pairs([]))

    def test_repetition_counts_once_per_pair(self):
        matrix = build_matrix(corpus_from_pairs([("a a a b", "x x")]))
        assert _counts_by_word(matrix) == {("a", "x"): 1, ("b", "x"): 1}

    def test_counting_is_case_insensitive(self):
        matrix = build_matrix(corpus_from_pairs([("The the THE", "Le le")]))
        assert _counts_by_word(matrix) == {("the", "le"): 1}

    def test_punctuation_excluded(self):
        matrix = build_matrix(corpus_from_pairs([("a, b.", "x!")]))
        assert _counts_by_word(matrix) == {("a", "x"): 1, ("b", "x"): 1}

    def test_stopwords_excluded_per_side(self):
        matrix = build_matrix(
            corpus_from_pairs([("the cat", "le chat")]),
            stop_src=StopwordSet.from_words("xx", ["the"]),
            stop_tgt=StopwordSet.from_words("yy", ["le"]),
        )
        assert _counts_by_word(matrix) == {("cat", "chat"): 1}

    def test_additivity_over_corpora(self):
        part_a = [("a b", "x")]
        part_b = [("a c", "x y")]
        merged = _counts_by_word(build_matrix(corpus_from_pairs(part_a + part_b)))
        counts_a = _counts_by_word(build_matrix(corpus_from_pairs(part_a)))
        counts_b = _counts_by_word(build_matrix(corpus_from_pairs(part_b)))
        summed = dict(counts_a)
        for key, c in counts_b.items():
            summed[key] = summed.get(key, 0) + c
        assert merged == summed

    def test_marginals_are_row_and_column_sums(self):
        matrix = build_matrix(
            corpus_from_pairs([("a b", "x y"), ("b c", "y z"), ("a c", "x z")])
        )
        for word, i in matrix.vocab_source.items():
            row = sum(c for (si, _), c in matrix.counts.items() if si == i)
            assert matrix.source_totals[i] == row
        for word, j in matrix.vocab_target.items():
            col = sum(c for (_, tj), c in matrix.counts.items() if tj == j)
            assert matrix.target_totals[j] == col
        assert matrix.pair_total == sum(matrix.counts.values())

    def test_transpose_symmetry(self):
        pairs = [("a b", "x"), ("a c", "x y")]
        forward = _counts_by_word(build_matrix(corpus_from_pairs(pairs)))
        flipped = _counts_by_word(
            build_matrix(corpus_from_pairs([(t, s) for s, t in pairs]))
        )
        assert flipped == {(t, s): c for (s, t), c in forward.items()}


class TestAssociationScore:
    @pytest.fixture
    def matrix(self):
        return build_matrix(corpus_from_pairs([("a b", "x"), ("a c", "x y")]))

    def test_reference_value(self, matrix):
        assert association_score(matrix, "a", "x") == pytest.approx(
            -0.10536051565782628, abs=1e-12
        )

    def test_unseen_words_score_log_n(self, matrix):
        assert association_score(matrix, "qq", "zz") == pytest.approx(
            math.log(6), abs=1e-12
        )

    def test_matches_oracle_on_all_vocab_pairs(self, matrix):
        counts = cooc_counts_oracle([("a b", "x"), ("a c", "x y")])
        for s in list(matrix.vocab_source) + ["novel"]:
            for t in list(matrix.vocab_target) + ["unseen"]:
                assert association_score(matrix, s, t) == pytest.approx(
                    pmi_oracle(counts, s, t), abs=1e-12
                )

    def test_case_insensitive_lookup(self, matrix):
        assert association_score(matrix, "A", "X") == association_score(
            matrix, "a", "x"
        )

    def test_seen_together_beats_never_together(self):
        matrix = build_matrix(
            corpus_from_pairs([("cat", "chat"), ("cat", "chat"), ("dog", "chien")])
        )
        together = association_score(matrix, "cat", "chat")
        apart = association_score(matrix, "cat", "chien")
        assert together > apart


class TestGate:
    @pytest.fixture
    def matrix(self):
        return build_matrix(
            corpus_from_pairs([("cat", "chat"), ("cat", "chat"), ("dog", "chien")])
        )

    def test_passing_pair_gets_score(self, matrix):
        passed, scored = cooc_gate(_candidate("cat", "chat"), matrix, 0.0)
        assert passed is True
        assert scored.cooc == pytest.approx(
            association_score(matrix, "cat", "chat")
        )

    def test_failing_pair_still_carries_score(self, matrix):
        passed, scored = cooc_gate(_candidate("cat", "chien"), matrix, 0.0)
        assert passed is False
        assert scored.cooc is not None

    def test_original_side_passes_without_score(self, matrix):
        for src_rep, tgt_rep in [(None, "chat"), ("cat", None), (None, None)]:
            passed, scored = cooc_gate(_candidate(src_rep, tgt_rep), matrix, 99.0)
            assert passed is True
            assert scored.cooc is None

    def test_minus_infinity_passes_everything(self, matrix):
        passed, _ = cooc_gate(
            _candidate("cat", "chien"), matrix, float("-inf")
        )
        assert passed is True

    def test_threshold_is_inclusive(self, matrix):
        score = association_score(matrix, "cat", "chat")
        passed, _ = cooc_gate(_candidate("cat", "chat"), matrix, score)
        assert passed is True


class TestSidecar:
    def test_round_trip(self, tmp_path):
        matrix = build_matrix(corpus_from_pairs([("a b", "x"), ("a c", "x y")]))
        path = tmp_path / "matrix.tsv"
        save_matrix(matrix, path)
        loaded = load_matrix(path)
        assert loaded == matrix

    def test_file_format(self, tmp_path):
        matrix = build_matrix(corpus_from_pairs([("b a", "x")]))
        path = tmp_path / "matrix.tsv"
        save_matrix(matrix, path)
        assert path.read_text(encoding="utf-8") == (
            "source\ttarget\tcount\n" "a\tx\t1\n" "b\tx\t1\n"
        )

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "matrix.tsv"
        path.write_text("a\tx\t1\n", encoding="utf-8")
        with pytest.raises(IoError):
            load_matrix(path)

    def test_bad_count_rejected(self, tmp_path):
        path = tmp_path / "matrix.tsv"
        path.write_text("source\ttarget\tcount\na\tx\tmany\n", encoding="utf-8")
        with pytest.raises(IoError):
            load_matrix(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(IoError):
            load_matrix(tmp_path / "absent.tsv")

    def test_scores_survive_round_trip(self, tmp_path):
        matrix = build_matrix(
            corpus_from_pairs([("cat", "chat"), ("dog", "chien")])
        )
        path = tmp_path / "matrix.tsv"
        save_matrix(matrix, path)
        loaded = load_matrix(path)
        for s in ("cat", "dog", "new"):
            for t in ("chat", "chien", "new"):
                assert association_score(loaded, s, t) == association_score(
                    matrix, s, t
                )
