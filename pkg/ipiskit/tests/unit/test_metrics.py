"""Unit tests for proofreading and MT metrics."""

import math
from collections import Counter
import random

import pytest

from ipiskit.app.core.exceptions import CorpusLengthMismatchError
from ipiskit.app.schemas.normalize import NormalizedBag
from ipiskit.app.services.metrics import (
    aggregate_proof,
    bleu_stats,
    bleu_signature,
    chrf,
    chrf_pp,
    corpus_bleu,
    mt_scores,
    proof_scores,
)
from ipiskit.app.services.normalize import normalize

TOLERANCE = 1e-9


def bag(*tokens: str) -> NormalizedBag:
    return NormalizedBag(tokens=tokens, source_len=len(tokens))


# Brute-force oracles: explicit lists and list.count, no Counter arithmetic.

def _oracle_proof(src: list[str], gold: list[str], pred: list[str]) -> dict:
    symbols = sorted(set(src) | set(gold) | set(pred))
    tp = fp = fn = overlap = union = 0
    for s in symbols:
        g_edit = max(0, gold.count(s) - src.count(s))
        p_edit = max(0, pred.count(s) - src.count(s))
        tp += min(g_edit, p_edit)
        fp += max(0, p_edit - g_edit)
        fn += max(0, g_edit - p_edit)
        overlap += min(gold.count(s), pred.count(s))
        union += max(gold.count(s), pred.count(s))
    precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = 100.0 * overlap / union if union else 0.0
    return {"tp": tp, "fp": fp, "fn": fn, "precision": precision, "recall": recall, "f1": f1, "accuracy": accuracy}


def _grams(seq, n):
    return [tuple(seq[i:i + n]) for i in range(len(seq) - n + 1)]


def _clipped(hyp_grams, ref_grams):
    return sum(min(hyp_grams.count(g), ref_grams.count(g)) for g in set(hyp_grams))


def _oracle_bleu(preds: list[str], refs: list[str]) -> float:
    matches, totals = [0] * 4, [0] * 4
    c = r = 0
    for pred, ref in zip(preds, refs):
        hyp, rt = pred.split(), ref.split()
        c += len(hyp)
        r += len(rt)
        for n in range(1, 5):
            matches[n - 1] += _clipped(_grams(hyp, n), _grams(rt, n))
            totals[n - 1] += len(_grams(hyp, n))
    if c == 0:
        return 100.0 if r == 0 else 0.0
    used = [n for n in range(4) if totals[n]]
    if any(matches[n] == 0 for n in used):
        return 0.0
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return min(100.0, 100.0 * bp * math.exp(sum(math.log(matches[n] / totals[n]) for n in used) / len(used)))


def _oracle_chrf(preds: list[str], refs: list[str], word_n: int = 0) -> float:
    orders = 6 + word_n
    hyp_tot, ref_tot, match = [0] * orders, [0] * orders, [0] * orders
    if not any(p.strip() or q.strip() for p, q in zip(preds, refs)):
        return 100.0
    for pred, ref in zip(preds, refs):
        hyp_chars, ref_chars = "".join(pred.split()), "".join(ref.split())
        rows = [(_grams(hyp_chars, n), _grams(ref_chars, n)) for n in range(1, 7)]
        rows += [(_grams(pred.split(), n), _grams(ref.split(), n)) for n in range(1, word_n + 1)]
        for i, (h, g) in enumerate(rows):
            # a segment without reference n-grams of an order contributes no hypothesis n-grams to it
            hyp_tot[i] += len(h) if g else 0
            ref_tot[i] += len(g)
            match[i] += _clipped(h, g)
    used = [i for i in range(orders) if hyp_tot[i] and ref_tot[i]]
    if not used:
        return 0.0
    p = sum(match[i] / hyp_tot[i] for i in used) / len(used)
    r = sum(match[i] / ref_tot[i] for i in used) / len(used)
    if p + r == 0:
        return 0.0
    return 100.0 * 5 * p * r / (4 * p + r)


class TestProofScores:
    """Test cases for proofreading scores."""

    def test_worked_example(self):
        """Test the hand-computed multiset example."""
        scores = proof_scores(bag("a", "b"), bag("a", "b", "c", "d"), bag("a", "b", "c", "e"))

        assert (scores.tp, scores.fp, scores.fn) == (1, 1, 1)
        assert scores.precision == 50.0
        assert scores.recall == 50.0
        assert scores.f1 == 50.0
        assert scores.accuracy == 60.0

    def test_prediction_equal_to_gold(self, stoplist):
        """Test a perfect prediction scores 100 everywhere."""
        src = normalize("Tegoroczni laureaci Oscarów pozowali na czerwonym dywanie.", stoplist)
        gold = normalize("Tegoroczn*i/e laurea*ci/tki Oscarów pozowa*li/ły na czerwonym dywanie.", stoplist)

        scores = proof_scores(src, gold, gold)

        assert (scores.accuracy, scores.precision, scores.recall, scores.f1) == (100.0, 100.0, 100.0, 100.0)

    def test_prediction_equal_to_source(self, stoplist):
        """Test copying the source gets no recall."""
        src = normalize("Studenci przyszli.", stoplist)
        gold = normalize("Studen*ci/tki przysz*li/ły.", stoplist)

        scores = proof_scores(src, gold, src)

        assert scores.recall == 0.0
        assert scores.tp == 0
        assert scores.fn == 2

    def test_zero_denominators(self):
        """Test empty edit sets and empty bags give 0 instead of failing."""
        scores = proof_scores(bag(), bag(), bag())

        assert (scores.accuracy, scores.precision, scores.recall, scores.f1) == (0.0, 0.0, 0.0, 0.0)

    def test_matches_brute_force_oracle(self):
        """Test 1000 random multiset triples against the oracle and the F1 bound."""
        rng = random.Random(7)
        alphabet = "abcdefgh"
        for _ in range(1000):
            src, gold, pred = (
                [rng.choice(alphabet) for _ in range(rng.randint(0, 12))] for _ in range(3)
            )
            scores = proof_scores(bag(*src), bag(*gold), bag(*pred))
            expected = _oracle_proof(src, gold, pred)

            assert (scores.tp, scores.fp, scores.fn) == (expected["tp"], expected["fp"], expected["fn"])
            for name in ("precision", "recall", "f1", "accuracy"):
                assert abs(getattr(scores, name) - expected[name]) <= TOLERANCE
            assert scores.f1 <= max(scores.precision, scores.recall) + TOLERANCE

    def test_micro_aggregation(self):
        """Test aggregation sums counts rather than averaging scores."""
        first = proof_scores(bag("a"), bag("a", "b"), bag("a", "b"))
        second = proof_scores(bag("a"), bag("a", "b", "c", "d"), bag("a"))

        total = aggregate_proof([first, second])

        assert (total.tp, total.fp, total.fn) == (1, 0, 3)
        assert total.precision == 100.0
        assert total.recall == 25.0
        assert total.f1 == pytest.approx(40.0)
        assert total.accuracy == pytest.approx(100.0 * 3 / 6)


class TestBleu:
    """Test cases for corpus BLEU."""

    def test_brevity_penalty_example(self):
        """Test a short hypothesis with perfect precisions."""
        assert corpus_bleu(["a b c d"], ["a b c d e"]) == pytest.approx(100 * math.exp(-0.25))
        assert round(corpus_bleu(["a b c d"], ["a b c d e"]), 2) == 77.88

    def test_identity(self):
        """Test identical corpora score 100."""
        refs = ["Workers must be informed in good time.", "Pracownicy i pracownice."]
        assert corpus_bleu(refs, refs) == pytest.approx(100.0)

    def test_empty_corpora(self):
        """Test empty hypotheses against empty and non-empty references."""
        assert corpus_bleu([""], [""]) == 100.0
        assert corpus_bleu([""], ["a"]) == 0.0

    def test_missing_order_gives_zero(self):
        """Test no smoothing: an order with zero matches zeroes the score."""
        stats = bleu_stats(["a b x d"], ["a b c d"])

        assert stats.matches[2] == 0
        assert stats.score == 0.0

    def test_length_mismatch(self):
        """Test corpora of different sizes are rejected."""
        with pytest.raises(CorpusLengthMismatchError):
            corpus_bleu(["a"], ["a", "b"])

    def test_lowercase_option(self):
        """Test lowercasing before scoring."""
        assert corpus_bleu(["A B"], ["a b"]) == 0.0
        assert corpus_bleu(["A B"], ["a b"], lowercase=True) == pytest.approx(100.0)

    def test_matches_brute_force_oracle(self):
        """Test 200 random corpora against the oracle."""
        rng = random.Random(11)
        words = ["a", "b", "c", "d", "e"]

        def sentence():
            return " ".join(rng.choice(words) for _ in range(rng.randint(0, 8)))

        for _ in range(200):
            size = rng.randint(1, 3)
            preds = [sentence() for _ in range(size)]
            refs = [sentence() for _ in range(size)]

            assert abs(corpus_bleu(preds, refs) - _oracle_bleu(preds, refs)) <= TOLERANCE


class TestChrf:
    """Test cases for chrF and chrF++."""

    def test_three_character_example(self):
        """Test abc against abd: P = R = 7/18 averaged over three orders."""
        assert chrf(["abc"], ["abd"]) == pytest.approx(100 * 7 / 18, abs=TOLERANCE)

    def test_identity(self):
        """Test identical corpora score 100."""
        refs = ["Tegoroczni laureaci.", "Workers and their representatives."]

        assert chrf(refs, refs) == pytest.approx(100.0)
        assert chrf_pp(refs, refs) == pytest.approx(100.0)

    def test_whitespace_ignored_for_characters(self):
        """Test character n-grams ignore spacing."""
        assert chrf(["a bc"], ["ab c"]) == pytest.approx(100.0)

    def test_empty_hypothesis(self):
        """Test an empty hypothesis against a real reference."""
        assert chrf([""], ["abc"]) == 0.0
        assert chrf([""], [""]) == 100.0

    def test_matches_brute_force_oracle(self):
        """Test 200 random corpora against the oracle, with and without word n-grams."""
        rng = random.Random(5)
        words = ["ab", "ba", "abc", "c", "ca"]

        def sentence():
            return " ".join(rng.choice(words) for _ in range(rng.randint(0, 6)))

        for _ in range(200):
            size = rng.randint(1, 3)
            preds = [sentence() for _ in range(size)]
            refs = [sentence() for _ in range(size)]

            assert abs(chrf(preds, refs) - _oracle_chrf(preds, refs)) <= TOLERANCE
            assert abs(chrf_pp(preds, refs) - _oracle_chrf(preds, refs, word_n=2)) <= TOLERANCE

    def test_mt_scores_bundle(self):
        """Test the three metrics are reported together."""
        scores = mt_scores(["a b c d"], ["a b c d e"])

        assert scores.kind == "mt"
        assert scores.bleu == pytest.approx(corpus_bleu(["a b c d"], ["a b c d e"]))
        assert scores.chrf == pytest.approx(chrf(["a b c d"], ["a b c d e"]))


class TestBleuSignature:
    """Test cases for the recorded BLEU variant."""

    def test_variant_is_unsmoothed_and_pre_tokenized(self):
        """Test the signature names the tokenizer and smoothing in use."""
        signature = bleu_signature()

        assert "tok:none" in signature
        assert "smooth:none" in signature
        assert "case:mixed" in signature
        assert signature.endswith("(pre-tokenized by ipiskit)")

    def test_lowercase_variant(self):
        """Test lowercasing shows up in the signature."""
        assert "case:lc" in bleu_signature(lowercase=True)


class TestMetricProperties:
    """Seeded property checks over random inputs."""

    def test_appending_identical_pair_keeps_perfect_scores(self):
        """Test a perfect corpus stays at 100 when an identical pair is appended."""
        rng = random.Random(23)
        words = ["Pracownicy", "przyszli", "na", "spotkanie", ",", ".", "Workers", "came", "a"]

        def sentence():
            return " ".join(rng.choice(words) for _ in range(rng.randint(0, 9)))

        for _ in range(100):
            corpus = [sentence() for _ in range(rng.randint(1, 4))]
            extra = sentence()
            extended = corpus + [extra]

            assert corpus_bleu(extended, extended) == pytest.approx(100.0)
            assert chrf(extended, extended) == pytest.approx(100.0)
            assert chrf_pp(extended, extended) == pytest.approx(100.0)

    def test_gold_beats_source_on_recall(self):
        """Test predicting the gold recalls strictly more than copying the source."""
        rng = random.Random(29)
        alphabet = "abcdef"
        checked = 0
        for _ in range(500):
            src, gold = ([rng.choice(alphabet) for _ in range(rng.randint(0, 10))] for _ in range(2))
            if not Counter(gold) - Counter(src):
                continue
            checked += 1

            as_gold = proof_scores(bag(*src), bag(*gold), bag(*gold))
            as_source = proof_scores(bag(*src), bag(*gold), bag(*src))

            assert as_gold.recall > as_source.recall
        assert checked > 100
