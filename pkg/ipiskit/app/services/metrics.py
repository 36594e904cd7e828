"""
Proofreading and MT metrics.

Proofreading scores compare normalized bags: the edit sets are what the gold
target and the prediction add to the source bag. MT metrics (BLEU, chrF,
chrF++) are corpus-level and computed with sacrebleu; BLEU runs on the
toolkit tokenizer, chrF on raw strings.
"""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence

from sacrebleu.metrics import BLEU, CHRF

from ipiskit.app.core.exceptions import CorpusLengthMismatchError
from ipiskit.app.schemas.normalize import NormalizedBag
from ipiskit.app.schemas.report import BleuStats, MtScores, ProofScores
from ipiskit.app.services.normalize import tokenize

logger = logging.getLogger(__name__)

BLEU_MAX_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_PP_WORD_ORDER = 2
CHRF_BETA = 2.0


def _percent(numerator: int, denominator: int) -> float:
    if denominator == 0:
        return 0.0
    return 100.0 * numerator / denominator


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _size(counts: Counter) -> int:
    return sum(counts.values())


def _scores_from_counts(tp: int, fp: int, fn: int, overlap: int, union: int) -> ProofScores:
    precision = _percent(tp, tp + fp)
    recall = _percent(tp, tp + fn)
    return ProofScores(
        accuracy=_percent(overlap, union),
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        tp=tp,
        fp=fp,
        fn=fn,
        overlap=overlap,
        union=union,
    )


def proof_scores(src: NormalizedBag, gold: NormalizedBag, pred: NormalizedBag) -> ProofScores:
    """
    Score one proofreading prediction.

    Edit sets are multiset differences against the source bag:
    E_gold = gold - src, E_pred = pred - src. Precision and recall count
    edits; accuracy is the multiset Jaccard of pred and gold.

    Args:
        src: Normalized source text
        gold: Normalized gold target
        pred: Normalized model output

    Returns:
        ProofScores in percent; zero denominators give 0

    Examples:
        src={a,b}, gold={a,b,c,d}, pred={a,b,c,e} gives tp=fp=fn=1,
        P=R=F1=50 and accuracy 60.
    """
    src_counts, gold_counts, pred_counts = src.counts, gold.counts, pred.counts
    gold_edits = gold_counts - src_counts
    pred_edits = pred_counts - src_counts

    return _scores_from_counts(
        tp=_size(pred_edits & gold_edits),
        fp=_size(pred_edits - gold_edits),
        fn=_size(gold_edits - pred_edits),
        overlap=_size(pred_counts & gold_counts),
        union=_size(pred_counts | gold_counts),
    )


def aggregate_proof(scores: Iterable[ProofScores]) -> ProofScores:
    """Micro-aggregate instance scores from their summed counts."""
    tp = fp = fn = overlap = union = 0
    for item in scores:
        tp += item.tp
        fp += item.fp
        fn += item.fn
        overlap += item.overlap
        union += item.union
    return _scores_from_counts(tp, fp, fn, overlap, union)


def _check_lengths(preds: Sequence[str], refs: Sequence[str]) -> None:
    if len(preds) != len(refs):
        raise CorpusLengthMismatchError(len(preds), len(refs))


def _has_text(preds: Sequence[str], refs: Sequence[str]) -> bool:
    return any(pred.strip() or ref.strip() for pred, ref in zip(preds, refs))


def _bleu_metric(lowercase: bool) -> BLEU:
    # Input is pre-tokenized by the toolkit tokenizer, so sacrebleu only splits on spaces.
    return BLEU(
        tokenize="none",
        smooth_method="none",
        effective_order=True,
        lowercase=lowercase,
        max_ngram_order=BLEU_MAX_ORDER,
        force=True,
    )


def bleu_signature(lowercase: bool = False) -> str:
    """BLEU variant recorded in report manifests."""
    return f"{_bleu_metric(lowercase).get_signature()} (pre-tokenized by ipiskit)"


def bleu_stats(preds: Sequence[str], refs: Sequence[str], lowercase: bool = False) -> BleuStats:
    """
    Corpus BLEU with its sufficient statistics.

    Tokens come from the toolkit tokenizer with punctuation kept. No
    smoothing: orders without hypothesis n-grams are skipped, and any
    remaining order with zero matches gives 0. Two empty corpora score 100.

    Raises:
        CorpusLengthMismatchError: If preds and refs differ in length
    """
    _check_lengths(preds, refs)
    if not _has_text(preds, refs):
        return BleuStats(
            matches=(0,) * BLEU_MAX_ORDER,
            totals=(0,) * BLEU_MAX_ORDER,
            hyp_len=0,
            ref_len=0,
            brevity_penalty=1.0,
            score=100.0,
        )

    hyps = [" ".join(tokenize(pred)) for pred in preds]
    tokenized_refs = [" ".join(tokenize(ref)) for ref in refs]
    result = _bleu_metric(lowercase).corpus_score(hyps, [tokenized_refs])

    score = min(100.0, result.score)
    return BleuStats(
        matches=tuple(int(count) for count in result.counts),
        totals=tuple(int(total) for total in result.totals),
        hyp_len=result.sys_len,
        ref_len=result.ref_len,
        brevity_penalty=result.bp,
        score=score,
    )


def corpus_bleu(preds: Sequence[str], refs: Sequence[str], lowercase: bool = False) -> float:
    """
    Corpus BLEU in [0, 100].

    Examples:
        >>> round(corpus_bleu(["a b c d"], ["a b c d e"]), 2)
        77.88
    """
    return bleu_stats(preds, refs, lowercase=lowercase).score


def chrf(
    preds: Sequence[str],
    refs: Sequence[str],
    char_n: int = CHRF_CHAR_ORDER,
    word_n: int = 0,
    beta: float = CHRF_BETA,
    lowercase: bool = False,
) -> float:
    """
    Corpus chrF (word_n=0) or chrF++ (word_n=2) in [0, 100].

    Matched, hypothesis and reference n-gram counts are summed over the
    corpus per order. Precision and recall are averaged over the orders
    present on both sides and combined into F-beta. Whitespace is removed
    before character n-grams are taken. Two corpora without any text score 100.

    Raises:
        CorpusLengthMismatchError: If preds and refs differ in length
    """
    _check_lengths(preds, refs)
    if not _has_text(preds, refs):
        return 100.0

    metric = CHRF(
        char_order=char_n,
        word_order=word_n,
        beta=beta,
        lowercase=lowercase,
        whitespace=False,
        eps_smoothing=False,
    )
    return min(100.0, metric.corpus_score(list(preds), [list(refs)]).score)


def chrf_pp(preds: Sequence[str], refs: Sequence[str], lowercase: bool = False) -> float:
    """chrF++: chrF plus word unigrams and bigrams."""
    return chrf(preds, refs, word_n=CHRF_PP_WORD_ORDER, lowercase=lowercase)


def mt_scores(preds: Sequence[str], refs: Sequence[str], lowercase: bool = False) -> MtScores:
    """BLEU, chrF and chrF++ of one corpus."""
    scores = MtScores(
        bleu=corpus_bleu(preds, refs, lowercase=lowercase),
        chrf=chrf(preds, refs, lowercase=lowercase),
        chrf_pp=chrf_pp(preds, refs, lowercase=lowercase),
    )
    logger.debug(
        f"[EVAL] MT corpus of {len(preds)}: BLEU={scores.bleu:.2f} "
        f"chrF={scores.chrf:.2f} chrF++={scores.chrf_pp:.2f}"
    )
    return scores
