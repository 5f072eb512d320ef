"""Prediction scoring: exact match, BLEU-4, ROUGE-LCS, confidence buckets."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import EmptyCorpus

SENTENCE_BLEU_EPS = 0.1  # numerator stand-in for zero clipped counts


def normalize_ws(text: str) -> str:
    return " ".join(text.split())


def exact_match(prediction: str, target: str, strict: bool = False) -> bool:
    """Token-identical after whitespace normalization (or byte-equal when
    ``strict``)."""
    if strict:
        return prediction == target
    return normalize_ws(prediction) == normalize_ws(target)


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_matches(cand: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int]:
    cand_counts = _ngram_counts(cand, n)
    ref_counts = _ngram_counts(ref, n)
    clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
    return clipped, sum(cand_counts.values())


def _brevity_penalty(cand_len: int, ref_len: int) -> float:
    if cand_len == 0:
        return 0.0
    if cand_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / cand_len)


def sentence_bleu(prediction: str, target: str, max_n: int = 4) -> float:
    """Smoothed sentence-level BLEU with uniform 1..max_n weights.

    Orders with no candidate n-grams are excluded from the geometric mean;
    zero clipped counts are replaced by a small epsilon so per-instance
    distributions stay comparable.
    """
    cand = prediction.split()
    ref = target.split()
    log_sum = 0.0
    used = 0
    for n in range(1, max_n + 1):
        clipped, total = _clipped_matches(cand, ref, n)
        if total == 0:
            continue
        used += 1
        p = clipped / total if clipped > 0 else SENTENCE_BLEU_EPS / total
        log_sum += math.log(p)
    if used == 0:
        return 0.0
    return _brevity_penalty(len(cand), len(ref)) * math.exp(log_sum / used)


def corpus_bleu(pairs: Sequence[tuple[str, str]], max_n: int = 4) -> float:
    """Unsmoothed corpus BLEU with brevity penalty."""
    if not pairs:
        raise EmptyCorpus("corpus_bleu needs at least one pair")
    clipped_totals = [0] * max_n
    count_totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for prediction, target in pairs:
        cand = prediction.split()
        ref = target.split()
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            clipped, total = _clipped_matches(cand, ref, n)
            clipped_totals[n - 1] += clipped
            count_totals[n - 1] += total
    log_sum = 0.0
    used = 0
    for clipped, total in zip(clipped_totals, count_totals):
        if total == 0:
            continue
        if clipped == 0:
            return 0.0
        used += 1
        log_sum += math.log(clipped / total)
    if used == 0:
        return 0.0
    return _brevity_penalty(cand_len, ref_len) * math.exp(log_sum / used)


def bleu4(pairs: Sequence[tuple[str, str]]) -> tuple[float, list[float]]:
    """Corpus BLEU-4 plus smoothed per-sentence scores."""
    if not pairs:
        raise EmptyCorpus("bleu4 needs at least one pair")
    return corpus_bleu(pairs), [sentence_bleu(p, t) for p, t in pairs]


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(prediction: str, target: str) -> tuple[float, float, float]:
    """ROUGE-LCS precision, recall, and F1 (empty inputs score 0)."""
    cand = prediction.split()
    ref = target.split()
    lcs = _lcs_length(cand, ref)
    precision = lcs / len(cand) if cand else 0.0
    recall = lcs / len(ref) if ref else 0.0
    if precision + recall == 0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


@dataclass
class PredictionRecord:
    id: str
    prediction: str
    confidence: float
    stop_reason: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "prediction": self.prediction,
            "confidence": self.confidence,
            "stop_reason": self.stop_reason,
        }

    @classmethod
    def from_dict(cls, row: Mapping) -> "PredictionRecord":
        return cls(
            id=row["id"],
            prediction=row["prediction"],
            confidence=float(row["confidence"]),
            stop_reason=row.get("stop_reason", ""),
        )


@dataclass
class MetricReport:
    correct_fraction: float
    bleu4_corpus: float
    bleu4_sentence: list[float]
    rouge_l_precision: float
    rouge_l_recall: float
    rouge_l_f: float
    rouge_l_sentence_f: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "correct_fraction": self.correct_fraction,
            "bleu4_corpus": self.bleu4_corpus,
            "rouge_l_precision": self.rouge_l_precision,
            "rouge_l_recall": self.rouge_l_recall,
            "rouge_l_f": self.rouge_l_f,
        }


def score_pairs(pairs: Sequence[tuple[str, str]]) -> MetricReport:
    """All metrics for aligned (prediction, target) pairs; corpus ROUGE is
    the mean of per-instance values."""
    if not pairs:
        raise EmptyCorpus("score_pairs needs at least one pair")
    correct = sum(exact_match(p, t) for p, t in pairs)
    corpus, per_sentence = bleu4(pairs)
    rouge = [rouge_l(p, t) for p, t in pairs]
    n = len(pairs)
    return MetricReport(
        correct_fraction=correct / n,
        bleu4_corpus=corpus,
        bleu4_sentence=per_sentence,
        rouge_l_precision=sum(r[0] for r in rouge) / n,
        rouge_l_recall=sum(r[1] for r in rouge) / n,
        rouge_l_f=sum(r[2] for r in rouge) / n,
        rouge_l_sentence_f=[r[2] for r in rouge],
    )


@dataclass
class ConfidenceBucket:
    lo: float
    hi: float
    total: int = 0
    correct: int = 0

    @property
    def wrong(self) -> int:
        return self.total - self.correct

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "total": self.total,
            "correct": self.correct,
            "wrong": self.wrong,
        }


@dataclass
class ConfidenceBucketReport:
    buckets: list[ConfidenceBucket]

    def to_dict(self) -> dict:
        return {"buckets": [b.to_dict() for b in self.buckets]}


def bucket_by_confidence(
    records: Iterable[PredictionRecord],
    targets: Mapping[str, str],
) -> ConfidenceBucketReport:
    """Ten confidence buckets of width 0.1; confidence 1.0 joins the top one."""
    buckets = [ConfidenceBucket(lo=i / 10, hi=(i + 1) / 10) for i in range(10)]
    for rec in records:
        if not 0.0 <= rec.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {rec.confidence}")
        idx = min(int(rec.confidence * 10), 9)
        buckets[idx].total += 1
        if exact_match(rec.prediction, targets[rec.id]):
            buckets[idx].correct += 1
    return ConfidenceBucketReport(buckets)
