"""Paired statistical comparisons of two prediction sets.

McNemar's test with an odds ratio on paired correctness, the Wilcoxon
signed-rank test with Cliff's delta on paired score distributions, and
Holm's step-down correction for multiple comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from scipy import stats as sp_stats


@dataclass
class OddsRatio:
    value: Optional[float]  # None when both discordant counts are zero


@dataclass
class CliffsDelta:
    value: float
    magnitude: str  # negligible | small | medium | large


@dataclass
class StatResult:
    test_name: str
    p_value_raw: float
    p_value_adjusted: Optional[float] = None
    effect: Optional[object] = None

    def to_dict(self) -> dict:
        effect: Optional[dict] = None
        if isinstance(self.effect, OddsRatio):
            effect = {"odds_ratio": self.effect.value}
        elif isinstance(self.effect, CliffsDelta):
            effect = {
                "cliffs_delta": self.effect.value,
                "magnitude": self.effect.magnitude,
            }
        return {
            "test": self.test_name,
            "p_value": self.p_value_raw,
            "p_adjusted": self.p_value_adjusted,
            "effect": effect,
        }


EXACT_MCNEMAR_THRESHOLD = 25  # discordant-pair count below which the exact test is used
EXACT_WILCOXON_THRESHOLD = 25


def mcnemar(paired: Sequence[tuple[bool, bool]]) -> StatResult:
    """McNemar's test on paired correctness, OR = b/c over discordant pairs.

    b counts pairs where only the first model is correct, c where only the
    second is. Uses the exact binomial test for small discordant counts and
    the continuity-corrected chi-square otherwise.
    """
    b = sum(1 for x, y in paired if x and not y)
    c = sum(1 for x, y in paired if y and not x)
    n = b + c
    if n == 0:
        return StatResult("mcnemar", 1.0, effect=OddsRatio(None))
    odds = OddsRatio(math.inf if c == 0 else b / c)
    if n < EXACT_MCNEMAR_THRESHOLD:
        p = sp_stats.binomtest(b, n, 0.5).pvalue
    else:
        statistic = (abs(b - c) - 1) ** 2 / n
        p = float(sp_stats.chi2.sf(statistic, 1))
    return StatResult("mcnemar", min(p, 1.0), effect=odds)


def _exact_wilcoxon_p(ranks: Sequence[float], w_plus: float) -> float:
    """Exact two-sided p for the signed-rank statistic, conditioning on the
    observed (possibly tied) ranks. Doubled ranks keep sums integral."""
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    # distribution of the doubled W+ over all 2^n sign assignments
    dist = [1] + [0] * total
    for d in doubled:
        nxt = list(dist)
        for s in range(total - d + 1):
            if dist[s]:
                nxt[s + d] += dist[s]
        dist = nxt
    w2 = int(round(2 * w_plus))
    count_all = 2 ** len(doubled)
    lower = sum(dist[: w2 + 1])
    upper = sum(dist[w2:])
    return min(1.0, 2 * min(lower, upper) / count_all)


def wilcoxon_signed_rank(paired: Sequence[tuple[float, float]]) -> StatResult:
    """Two-sided Wilcoxon signed-rank test on paired values.

    Zero differences are dropped; ties get average ranks. The exact
    distribution is enumerated for small samples, otherwise a normal
    approximation with tie correction is used.
    """
    diffs = [x - y for x, y in paired if x != y]
    n = len(diffs)
    if n == 0:
        return StatResult("wilcoxon", 1.0)
    ranks = sp_stats.rankdata([abs(d) for d in diffs])
    w_plus = float(sum(r for r, d in zip(ranks, diffs) if d > 0))
    if n <= EXACT_WILCOXON_THRESHOLD:
        p = _exact_wilcoxon_p(ranks, w_plus)
    else:
        mu = n * (n + 1) / 4
        tie_term = sum((t**3 - t) for t in _tie_sizes(ranks)) / 48
        sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24 - tie_term)
        z = (w_plus - mu) / sigma
        p = min(1.0, 2 * float(sp_stats.norm.sf(abs(z))))
    return StatResult("wilcoxon", p)


def _tie_sizes(ranks: Sequence[float]) -> list[int]:
    from collections import Counter

    return [c for c in Counter(ranks).values() if c > 1]


def delta_magnitude(d: float) -> str:
    ad = abs(d)
    if ad < 0.10:
        return "negligible"
    if ad < 0.33:
        return "small"
    if ad < 0.474:
        return "medium"
    return "large"


def cliffs_delta(
    a: Sequence[float], b: Sequence[float], paired: bool = False
) -> StatResult:
    """Cliff's delta effect size with the standard magnitude thresholds.

    The default compares all |a|*|b| pairs; ``paired=True`` switches to the
    within-pair sign variant (requires equal lengths).
    """
    if not a or not b:
        raise ValueError("cliffs_delta needs two non-empty samples")
    if paired:
        if len(a) != len(b):
            raise ValueError("paired cliffs_delta needs equal-length samples")
        signed = sum((x > y) - (x < y) for x, y in zip(a, b))
        d = signed / len(a)
    else:
        gt = sum(1 for x in a for y in b if x > y)
        lt = sum(1 for x in a for y in b if x < y)
        d = (gt - lt) / (len(a) * len(b))
    return StatResult(
        "cliffs_delta", p_value_raw=float("nan"), effect=CliffsDelta(d, delta_magnitude(d))
    )


def holm_adjust(p_values: Sequence[float]) -> list[float]:
    """Holm's step-down adjustment, returned in the original order."""
    m = len(p_values)
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        value = min(1.0, p_values[idx] * (m - rank))
        running = max(running, value)
        adjusted[idx] = running
    return adjusted
