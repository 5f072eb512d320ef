"""Statistical n-gram completion baseline.

Greedy generation over raw frequency counts, no smoothing: an unseen context
simply ends generation (stopping heuristic H1). Generation also stops when
the emitted text closes the instance-level JSON object (H2), or at a safety
cap on emitted tokens.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import EmptyCorpus, ModelMissing

BOS = "<s>"
DEFAULT_MAX_TOKENS = 750

STOP_EXHAUSTED = "H1"  # no continuation for the current context
STOP_BALANCED = "H2"  # generated suffix closed the instance-level object
STOP_CAP = "cap"  # emission cap hit


@dataclass
class NgramModel:
    n: int
    table: dict[tuple[str, ...], Counter]
    vocab: set[str] = field(default_factory=set)

    @property
    def context_length(self) -> int:
        return self.n - 1

    def to_dict(self) -> dict:
        return {
            "format": "wfc-ngram-v1",
            "n": self.n,
            "table": {
                "\x1f".join(ctx): dict(counts) for ctx, counts in self.table.items()
            },
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "NgramModel":
        if obj.get("format") != "wfc-ngram-v1":
            raise ModelMissing(f"unknown model format: {obj.get('format')!r}")
        table = {
            tuple(key.split("\x1f")): Counter(counts)
            for key, counts in obj["table"].items()
        }
        vocab = set()
        for counts in table.values():
            vocab.update(counts)
        return cls(n=obj["n"], table=table, vocab=vocab)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> "NgramModel":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except FileNotFoundError as exc:
            raise ModelMissing(f"model file not found: {path}") from exc


@dataclass
class CompletionResult:
    tokens: list[str]
    confidence: float
    stop_reason: str

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def train(texts: Iterable[Sequence[str]], n: int) -> NgramModel:
    """Count every n-gram; sequence starts are padded with ``<s>`` tokens."""
    if n < 2:
        raise ValueError(f"order must be >= 2, got {n}")
    table: dict[tuple[str, ...], Counter] = defaultdict(Counter)
    vocab: set[str] = set()
    empty = True
    for seq in texts:
        empty = False
        padded = [BOS] * (n - 1) + list(seq)
        vocab.update(seq)
        for i in range(n - 1, len(padded)):
            table[tuple(padded[i - n + 1 : i])][padded[i]] += 1
    if empty:
        raise EmptyCorpus("n-gram training needs at least one sequence")
    return NgramModel(n=n, table=dict(table), vocab=vocab)


def _context_tuple(model: NgramModel, context: Sequence[str]) -> tuple[str, ...]:
    k = model.context_length
    ctx = list(context)[-k:]
    if len(ctx) < k:
        ctx = [BOS] * (k - len(ctx)) + ctx
    return tuple(ctx)


def next_token(
    model: NgramModel, context: Sequence[str]
) -> Optional[tuple[str, float]]:
    """Most frequent continuation of the last n-1 context tokens.

    Ties break to the lexicographically smallest token; unseen contexts
    yield None.
    """
    counts = model.table.get(_context_tuple(model, context))
    if not counts:
        return None
    best = min(counts, key=lambda tok: (-counts[tok], tok))
    return best, counts[best] / sum(counts.values())


def complete(
    model: NgramModel,
    prefix: Sequence[str],
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> CompletionResult:
    """Greedy completion of a token prefix with both stopping heuristics.

    Confidence is the product of the conditional probabilities of the
    emitted tokens (1.0 when nothing could be emitted).
    """
    context = list(prefix)
    emitted: list[str] = []
    confidence = 1.0
    depth = 0
    while True:
        if len(emitted) >= max_tokens:
            return CompletionResult(emitted, confidence, STOP_CAP)
        step = next_token(model, context)
        if step is None:
            return CompletionResult(emitted, confidence, STOP_EXHAUSTED)
        token, prob = step
        emitted.append(token)
        context.append(token)
        confidence *= prob
        if token == "{":
            depth += 1
        elif token == "}":
            depth -= 1
            if depth <= 0:
                return CompletionResult(emitted, confidence, STOP_BALANCED)


def predict_instances(
    model: NgramModel,
    instances: Iterable,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list:
    """Complete every instance input, returning PredictionRecord objects.

    Accepts :class:`wfc.dataset.Instance` objects or plain dicts with
    ``id``/``input`` keys.
    """
    from .metrics import PredictionRecord
    from .workflow import tokenize_texts

    records = []
    for inst in instances:
        if isinstance(inst, dict):
            inst_id, text = inst["id"], inst["input"]
        else:
            inst_id, text = inst.id, inst.input
        result = complete(model, tokenize_texts(text), max_tokens)
        records.append(
            PredictionRecord(
                id=inst_id,
                prediction=result.text,
                confidence=result.confidence,
                stop_reason=result.stop_reason,
            )
        )
    return records


def select_best_n(
    candidates: Sequence[int],
    train_texts: Sequence[Sequence[str]],
    eval_pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
) -> int:
    """Train one model per order and return the order with the highest
    exact-match rate on the eval pairs (smallest order wins ties)."""
    if not candidates:
        raise ValueError("need at least one candidate order")
    best_order = None
    best_score = -1.0
    for order in sorted(candidates):
        model = train(train_texts, order)
        correct = 0
        for prefix, target in eval_pairs:
            result = complete(model, prefix)
            if result.tokens == list(target):
                correct += 1
        score = correct / len(eval_pairs) if eval_pairs else 0.0
        if score > best_score:
            best_score = score
            best_order = order
    return best_order
