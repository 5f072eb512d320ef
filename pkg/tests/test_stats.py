import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from wfc.stats import (
    CliffsDelta,
    OddsRatio,
    cliffs_delta,
    delta_magnitude,
    holm_adjust,
    mcnemar,
    wilcoxon_signed_rank,
)


def exact_binomial_two_sided(k, n):
    """Two-sided p for Bin(n, 0.5) by direct tail summation."""
    def tail(from_k):
        return sum(math.comb(n, i) for i in range(from_k, n + 1)) / 2**n

    hi = max(k, n - k)
    return min(1.0, 2 * tail(hi))


def make_paired(b, c, concordant_yes=10, concordant_no=10):
    pairs = []
    pairs += [(True, True)] * concordant_yes
    pairs += [(False, False)] * concordant_no
    pairs += [(True, False)] * b
    pairs += [(False, True)] * c
    return pairs


class TestMcnemar:
    def test_odds_ratio(self):
        result = mcnemar(make_paired(b=15, c=5))
        assert isinstance(result.effect, OddsRatio)
        assert result.effect.value == pytest.approx(3.0)

    def test_symmetric_counts(self):
        result = mcnemar(make_paired(b=7, c=7))
        assert result.effect.value == pytest.approx(1.0)
        assert result.p_value_raw > 0.5

    def test_exact_p_matches_binomial_oracle(self):
        result = mcnemar(make_paired(b=15, c=5))
        assert result.p_value_raw == pytest.approx(
            exact_binomial_two_sided(15, 20), abs=1e-12
        )

    def test_all_small_counts_match_oracle(self):
        for b in range(0, 11):
            for c in range(0, 11):
                if b + c == 0:
                    continue
                result = mcnemar(make_paired(b=b, c=c))
                assert result.p_value_raw == pytest.approx(
                    exact_binomial_two_sided(b, b + c), abs=1e-9
                ), (b, c)

    def test_no_discordant_pairs(self):
        result = mcnemar([(True, True), (False, False)])
        assert result.p_value_raw == 1.0
        assert result.effect.value is None

    def test_concordant_invariance(self):
        a = mcnemar(make_paired(b=8, c=3, concordant_yes=0, concordant_no=0))
        b = mcnemar(make_paired(b=8, c=3, concordant_yes=50, concordant_no=70))
        assert a.p_value_raw == b.p_value_raw
        assert a.effect.value == b.effect.value

    def test_large_counts_use_chi_square(self):
        result = mcnemar(make_paired(b=40, c=10))
        # continuity-corrected chi-square: (|40-10|-1)^2 / 50
        from scipy.stats import chi2

        assert result.p_value_raw == pytest.approx(float(chi2.sf(29**2 / 50, 1)))


def enumerate_wilcoxon_p(diffs):
    """Exact two-sided p by enumerating all 2^n sign assignments."""
    from scipy.stats import rankdata

    n = len(diffs)
    ranks = rankdata([abs(d) for d in diffs])
    observed = sum(r for r, d in zip(ranks, diffs) if d > 0)
    totals = []
    for signs in itertools.product([0, 1], repeat=n):
        totals.append(sum(r for r, s in zip(ranks, signs) if s))
    lower = sum(1 for t in totals if t <= observed + 1e-9)
    upper = sum(1 for t in totals if t >= observed - 1e-9)
    return min(1.0, 2 * min(lower, upper) / len(totals))


class TestWilcoxon:
    def test_all_equal(self):
        result = wilcoxon_signed_rank([(1.0, 1.0), (2.0, 2.0)])
        assert result.p_value_raw == 1.0

    def test_six_pairs_extreme(self):
        pairs = [(i + 1.0, float(i)) for i in range(6)]
        result = wilcoxon_signed_rank(pairs)
        assert result.p_value_raw == pytest.approx(2 / 2**6)

    def test_eight_pair_fixture_matches_enumeration(self):
        diffs = [1.5, -0.5, 2.0, 0.25, -1.0, 3.0, 0.75, -0.25]
        pairs = [(d, 0.0) for d in diffs]
        result = wilcoxon_signed_rank(pairs)
        assert result.p_value_raw == pytest.approx(enumerate_wilcoxon_p(diffs))

    def test_random_fixtures_match_enumeration(self):
        rng = random.Random(17)
        for n in range(2, 11):
            diffs = [rng.choice([-3, -2, -1, 1, 2, 3]) * 0.5 for _ in range(n)]
            pairs = [(d, 0.0) for d in diffs]
            result = wilcoxon_signed_rank(pairs)
            assert result.p_value_raw == pytest.approx(
                enumerate_wilcoxon_p(diffs), abs=1e-9
            ), diffs

    def test_zero_differences_dropped(self):
        pairs = [(1.0, 1.0)] * 5 + [(2.0, 1.0), (3.0, 1.0), (1.0, 4.0)]
        with_zeros = wilcoxon_signed_rank(pairs)
        without = wilcoxon_signed_rank(pairs[5:])
        assert with_zeros.p_value_raw == without.p_value_raw

    def test_large_sample_normal_path(self):
        rng = random.Random(3)
        pairs = [(rng.random() + 0.2, rng.random()) for _ in range(100)]
        result = wilcoxon_signed_rank(pairs)
        assert 0.0 <= result.p_value_raw <= 1.0
        assert result.p_value_raw < 0.01  # consistent positive shift


class TestCliffsDelta:
    def test_identical_multisets(self):
        result = cliffs_delta([1, 2, 3], [3, 1, 2])
        assert result.effect.value == 0.0
        assert result.effect.magnitude == "negligible"

    def test_complete_separation(self):
        result = cliffs_delta([10, 11], [1, 2])
        assert result.effect.value == 1.0
        assert result.effect.magnitude == "large"

    def test_pair_enumeration(self):
        a, b = [3, 4, 5], [1, 4, 2]
        result = cliffs_delta(a, b)
        gt = sum(1 for x in a for y in b if x > y)
        lt = sum(1 for x in a for y in b if x < y)
        assert result.effect.value == pytest.approx((gt - lt) / 9)

    def test_antisymmetric(self):
        rng = random.Random(2)
        a = [rng.random() for _ in range(9)]
        b = [rng.random() for _ in range(7)]
        d_ab = cliffs_delta(a, b).effect.value
        d_ba = cliffs_delta(b, a).effect.value
        assert d_ab == pytest.approx(-d_ba)

    def test_paired_variant(self):
        result = cliffs_delta([2, 2, 0], [1, 1, 1], paired=True)
        assert result.effect.value == pytest.approx((2 - 1) / 3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cliffs_delta([], [1])

    @pytest.mark.parametrize(
        "d,expected",
        [
            (0.05, "negligible"), (0.10, "small"), (0.32, "small"),
            (0.33, "medium"), (0.47, "medium"), (0.474, "large"), (1.0, "large"),
            (-0.5, "large"),
        ],
    )
    def test_magnitude_thresholds(self, d, expected):
        assert delta_magnitude(d) == expected


class TestHolm:
    def test_spec_fixture(self):
        assert holm_adjust([0.01, 0.04, 0.03]) == pytest.approx([0.03, 0.06, 0.06])

    def test_single(self):
        assert holm_adjust([0.2]) == [0.2]

    def test_all_ones(self):
        assert holm_adjust([1.0, 1.0, 1.0]) == [1.0, 1.0, 1.0]

    @pytest.mark.parametrize(
        "ps,expected",
        [
            ([0.005, 0.01, 0.02, 0.04], [0.02, 0.03, 0.04, 0.04]),
            ([0.5, 0.6], [1.0, 1.0]),
            ([0.01, 0.01], [0.02, 0.02]),
            ([0.04, 0.01, 0.03, 0.005], [0.06, 0.03, 0.06, 0.02]),
            ([0.3], [0.3]),
        ],
    )
    def test_hand_computed_fixtures(self, ps, expected):
        assert holm_adjust(ps) == pytest.approx(expected)

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=12))
    def test_adjusted_at_least_raw(self, ps):
        adjusted = holm_adjust(ps)
        assert all(a >= p - 1e-12 for a, p in zip(adjusted, ps))
        assert all(0.0 <= a <= 1.0 for a in adjusted)

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8))
    def test_permutation_consistency(self, ps):
        # adjusting a permutation permutes the adjustments
        rng = random.Random(0)
        perm = list(range(len(ps)))
        rng.shuffle(perm)
        permuted = [ps[i] for i in perm]
        direct = holm_adjust(ps)
        via_perm = holm_adjust(permuted)
        for out_idx, in_idx in enumerate(perm):
            assert via_perm[out_idx] == pytest.approx(direct[in_idx])
