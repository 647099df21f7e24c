"""Tests for factored word ensembles.

Fixed-length factors, first-crossing prefix cuts, exhaustive
independence verification, norm-window checks, and the size-exponent
diagnostic.
"""

import itertools
import json
import math
import random

import pytest

from zaremba.cf import Alphabet, continuant
from zaremba.ensemble import (
    EnsembleParams,
    FactoredEnsemble,
    build_fixed_length_ensemble,
    ensemble_report,
    factor_cardinality_check,
    find_collision,
    split_by_norm,
    verify_independence,
    verify_norm_windows,
)
from zaremba.errors import DomainError, ResourceLimitError

from reference import all_words_up_to

# midpoint of the {1,2,3,4} pressure bracket at depth 22, frozen from a
# direct run; used only as a plausible reference input for diagnostics
DELTA_HAT_1234 = 0.7837022146123964


def flatten(combo):
    return tuple(d for part in combo for d in part)


class TestFactoredEnsemble:
    def test_rejects_no_factors(self):
        with pytest.raises(DomainError):
            FactoredEnsemble(factors=())

    def test_rejects_empty_factor(self):
        with pytest.raises(DomainError):
            FactoredEnsemble(factors=(((1,),), ()))

    def test_rejects_window_count_mismatch(self):
        with pytest.raises(DomainError):
            FactoredEnsemble(factors=(((1,),),), norm_windows=((1.0, 2.0), None))

    def test_product_size(self):
        e = FactoredEnsemble(factors=(((1,), (2,)), ((1, 1), (1, 2), (2, 1))))
        assert e.product_size == 6

    def test_words_normalized_to_tuples(self):
        e = FactoredEnsemble(factors=(([1, 2], [2, 1]),))
        assert e.factors == (((1, 2), (2, 1)),)


class TestBuildFixedLength:
    def test_two_unit_factors(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [1, 1])
        assert e.product_size == 4
        assert e.factors == (((1,), (2,)), ((1,), (2,)))

    def test_sizes_multiply(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [2, 3])
        assert [len(f) for f in e.factors] == [16, 64]
        assert e.product_size == 1024

    def test_single_factor_is_all_words_of_length(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [3])
        assert set(e.factors[0]) == set(itertools.product((1, 2), repeat=3))

    def test_rejects_empty_lengths(self):
        with pytest.raises(DomainError):
            build_fixed_length_ensemble(Alphabet((1, 2)), [])

    @pytest.mark.parametrize("bad", [0, -1, 2.0, True])
    def test_rejects_bad_length(self, bad):
        with pytest.raises(DomainError):
            build_fixed_length_ensemble(Alphabet((1, 2)), [bad])

    def test_factor_materialization_cap(self):
        # 4^12 words in one factor is past the 10^7 limit
        with pytest.raises(ResourceLimitError):
            build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [12])


class TestSplitByNorm:
    def test_single_digit_alphabet(self):
        words, report = split_by_norm(Alphabet((1,)), 100, 4.0)
        assert words == ((1, 1, 1, 1),)
        assert report.size == 1
        assert report.min_continuant == 5
        assert report.max_continuant == 5
        assert report.max_length == 4

    def test_two_digit_threshold_two(self):
        words, report = split_by_norm(Alphabet((1, 2)), 100, 2.0)
        assert set(words) == {(2,), (1, 1), (1, 2)}
        assert report.odd_length_count == 1
        assert report.min_continuant == 2
        assert report.max_continuant == 3

    def test_m1_must_exceed_one(self):
        with pytest.raises(DomainError):
            split_by_norm(Alphabet((1, 2)), 100, 1.0)

    def test_m1_must_be_below_n_limit(self):
        with pytest.raises(DomainError):
            split_by_norm(Alphabet((1, 2)), 10, 10.0)

    def test_deterministic(self):
        a = split_by_norm(Alphabet((1, 2, 3)), 10**6, 37.5)
        b = split_by_norm(Alphabet((1, 2, 3)), 10**6, 37.5)
        assert a[0] == b[0]
        assert a[1] == b[1]

    def test_prefix_free(self):
        rng = random.Random(5)
        for _ in range(25):
            digits = sorted(rng.sample(range(1, 6), rng.randint(2, 4)))
            m1 = rng.uniform(3.0, 400.0)
            words, _ = split_by_norm(Alphabet(digits), 10**6, m1)
            as_set = set(words)
            for w in words:
                for k in range(1, len(w)):
                    assert w[:k] not in as_set

    def test_every_long_word_has_exactly_one_crossing_prefix(self):
        # first-crossing cut: a word whose continuant has reached m1 owns
        # exactly one prefix in the collected set, a shorter word owns none
        alphabet = Alphabet((1, 2))
        m1 = 5.0
        words, _ = split_by_norm(alphabet, 100, m1)
        as_set = set(words)
        for w in all_words_up_to((1, 2), 8):
            hits = sum(1 for k in range(1, len(w) + 1) if w[:k] in as_set)
            if continuant(w) >= m1:
                assert hits == 1
            else:
                assert hits == 0

    def test_growth_bound(self):
        rng = random.Random(6)
        for _ in range(100):
            digits = sorted(rng.sample(range(1, 6), rng.randint(1, 4)))
            m1 = rng.uniform(2.5, 300.0)
            words, report = split_by_norm(Alphabet(digits), 10**7, m1)
            assert report.min_continuant >= m1
            assert report.max_continuant < (max(digits) + 1) * m1
            assert report.growth_bound_ok
            assert report.size == len(words)

    def test_size_cap(self):
        with pytest.raises(ResourceLimitError):
            split_by_norm(Alphabet((1, 2, 3, 4)), 10**18, 10.0**15)


class TestIndependence:
    def test_fixed_length_is_independent(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3)), [2, 1, 2])
        assert verify_independence(e)

    def test_known_counterexample(self):
        # (1)+(1,1) and (1,1)+(1) both concatenate to (1,1,1)
        e = FactoredEnsemble(factors=(((1,), (1, 1)), ((1, 1), (1,))))
        assert not verify_independence(e)
        witness = find_collision(e)
        assert witness is not None
        left, right = witness
        assert left != right
        assert flatten(left) == flatten(right)

    def test_singleton_factors(self):
        e = FactoredEnsemble(factors=(((1, 2),), ((2, 1),), ((1,),)))
        assert verify_independence(e)
        assert find_collision(e) is None

    def test_prefix_free_factor_gives_independence(self):
        # injectivity needs only the left factor to be prefix-free
        words, _ = split_by_norm(Alphabet((1, 2)), 1000, 8.0)
        e = FactoredEnsemble(factors=(words, words))
        assert verify_independence(e)

    def test_matches_brute_force_on_random_factors(self):
        rng = random.Random(7)
        for _ in range(50):
            factors = []
            for _ in range(rng.randint(2, 3)):
                count = rng.randint(2, 5)
                factor = set()
                while len(factor) < count:
                    n = rng.randint(1, 3)
                    factor.add(tuple(rng.randint(1, 2) for _ in range(n)))
                factors.append(tuple(sorted(factor)))
            e = FactoredEnsemble(factors=tuple(factors))
            flat = {flatten(c) for c in itertools.product(*factors)}
            assert verify_independence(e) == (len(flat) == e.product_size)

    def test_large_digits_use_exact_fallback(self):
        # digits above 2^62 packing range still verify correctly
        big = 2**40
        e = FactoredEnsemble(factors=(((big,), (big, big)), ((big, big), (big,))))
        assert not verify_independence(e)

    def test_product_cap(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [2] * 12)
        with pytest.raises(ResourceLimitError):
            verify_independence(e)

    def test_collision_search_cap(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [5, 6])
        with pytest.raises(ResourceLimitError):
            find_collision(e)


class TestQuasiMultiplicativityOfProducts:
    def test_product_continuant_bracketed_by_factor_continuants(self):
        rng = random.Random(8)
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [3, 2, 3])
        combos = list(itertools.product(*e.factors))
        for combo in rng.sample(combos, 200):
            prod = 1
            for part in combo:
                prod *= continuant(part)
            whole = continuant(flatten(combo))
            assert prod <= whole <= 2 ** (len(combo) - 1) * prod


class TestEnsembleParams:
    def test_defaults_valid(self):
        EnsembleParams()

    @pytest.mark.parametrize("eps", [0.0, -0.1, 0.0004, 0.001])
    def test_epsilon_range(self, eps):
        with pytest.raises(DomainError):
            EnsembleParams(epsilon0=eps)

    @pytest.mark.parametrize("field", ["m1", "m2", "m4"])
    def test_scales_at_least_one(self, field):
        with pytest.raises(DomainError):
            EnsembleParams(**{field: 0.5})

    @pytest.mark.parametrize(
        "field", ["c_lead_lower", "c_lead_upper", "c_inner_lower",
                  "c_rem_lower", "c_upper"])
    def test_constants_positive(self, field):
        with pytest.raises(DomainError):
            EnsembleParams(**{field: 0.0})

    def test_two_factor_layout(self):
        p = EnsembleParams(m1=100.0, n_limit=10**5)
        windows = p.derived_windows(Alphabet((1, 2, 3, 4)), 2)
        assert len(windows) == 2
        lead, rem = windows
        assert lead[0] == pytest.approx(100.0 / (70.0 * 16.0))
        assert lead[0] < lead[1]
        assert rem is not None and rem[0] < rem[1]

    def test_remainder_window_needs_n_limit(self):
        p = EnsembleParams(m1=100.0)
        windows = p.derived_windows(Alphabet((1, 2)), 2)
        assert windows[1] is None

    def test_four_factor_layout(self):
        p = EnsembleParams(m1=50.0, m2=30.0, m4=20.0)
        windows = p.derived_windows(Alphabet((1, 2)), 4)
        assert len(windows) == 4
        assert windows[2] is None
        assert all(w is None or w[0] < w[1] for w in windows)

    def test_other_counts_get_no_windows(self):
        p = EnsembleParams()
        assert p.derived_windows(Alphabet((1, 2)), 3) == (None, None, None)


class TestNormWindows:
    def test_extremes_of_fixed_length_factor(self):
        # over {1,2} the length-5 extremes are the all-ones and all-twos
        # words: continuants 8 and 70
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [5])
        report = verify_norm_windows(e)
        check = report.checks[0]
        assert check.min_continuant == continuant((1,) * 5) == 8
        assert check.max_continuant == continuant((2,) * 5) == 70
        assert check.size == 32
        assert check.inside is None
        assert report.all_inside  # vacuous without windows

    def test_unbounded_window_passes(self):
        e = FactoredEnsemble(
            factors=(((1, 2), (2, 1)),), norm_windows=((1.0, math.inf),))
        report = verify_norm_windows(e)
        assert report.checks[0].inside is True
        assert report.all_inside

    def test_tight_window_fails(self):
        e = FactoredEnsemble(
            factors=(((1, 2), (2, 2)),), norm_windows=((1.0, 4.0),))
        report = verify_norm_windows(e)
        assert report.checks[0].inside is False
        assert not report.all_inside

    def test_derived_windows_from_params(self):
        words, rep = split_by_norm(Alphabet((1, 2)), 10**4, 50.0)
        e = FactoredEnsemble(factors=(words, ((1,),)))
        p = EnsembleParams(m1=50.0, n_limit=10**4)
        report = verify_norm_windows(e, params=p, alphabet=Alphabet((1, 2)))
        lead = report.checks[0]
        assert lead.window == p.leading_window(Alphabet((1, 2)))
        assert lead.min_continuant == rep.min_continuant
        # the cut respects the lower edge; the upper edge m1^(1+2eps) is
        # tighter than the 2*A*m1 growth bound and need not hold
        assert lead.window[0] <= lead.min_continuant

    def test_params_without_alphabet_measures_only(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [2])
        report = verify_norm_windows(e, params=EnsembleParams())
        assert report.checks[0].inside is None

    def test_odd_length_counting(self):
        e = FactoredEnsemble(factors=(((1,), (1, 2), (2, 2, 1)),))
        report = verify_norm_windows(e)
        assert report.checks[0].odd_length_count == 2


class TestFactorCardinality:
    def test_singleton_exponent_zero(self):
        e = FactoredEnsemble(factors=(((1, 1, 1),),))
        rows = factor_cardinality_check(e, 0.5)
        assert rows[0].exponent == 0.0
        assert rows[0].reference == 1.0
        assert rows[0].deficit == 1.0

    def test_equal_lengths_equal_exponents(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [3, 3])
        rows = factor_cardinality_check(e, DELTA_HAT_1234)
        assert rows[0].exponent == rows[1].exponent
        assert rows[0].max_continuant == rows[1].max_continuant

    def test_fixed_length_exponent_value(self):
        # log(4^8) / log(<4,...,4>) with eight fours
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [8])
        rows = factor_cardinality_check(e, DELTA_HAT_1234)
        expected = math.log(4**8) / math.log(continuant((4,) * 8))
        assert rows[0].exponent == pytest.approx(expected, abs=1e-15)
        assert rows[0].exponent == pytest.approx(0.9648104898812064, abs=1e-12)

    def test_split_factor_approaches_reference(self):
        # a prefix cut at m1=500 is dense enough that its size exponent
        # sits within 0.2 of 2*delta_hat, unlike fixed-length factors
        words, report = split_by_norm(Alphabet((1, 2, 3, 4)), 10**6, 500.0)
        e = FactoredEnsemble(factors=(words,))
        rows = factor_cardinality_check(e, DELTA_HAT_1234)
        assert rows[0].size == 62920
        assert rows[0].max_continuant == report.max_continuant == 2408
        assert rows[0].exponent == pytest.approx(1.4190645142885272, abs=1e-12)
        assert abs(rows[0].deficit) < 0.2

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.3, 1.7])
    def test_delta_hat_range(self, bad):
        e = FactoredEnsemble(factors=(((1,),),))
        with pytest.raises(DomainError):
            factor_cardinality_check(e, bad)


class TestEnsembleReport:
    def test_report_structure(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [2, 3])
        out = ensemble_report(e, delta_hat=0.5312)
        assert out["factor_count"] == 2
        assert out["product_size"] == 32
        assert out["independent"] is True
        assert len(out["factors"]) == 2
        assert len(out["cardinality"]) == 2
        assert out["cardinality"][0]["reference"] == pytest.approx(1.0624)
        json.dumps(out)

    def test_report_skips_cardinality_without_delta(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2)), [2])
        out = ensemble_report(e)
        assert "cardinality" not in out

    def test_oversized_product_reported_as_unverified(self):
        e = build_fixed_length_ensemble(Alphabet((1, 2, 3, 4)), [2] * 12)
        out = ensemble_report(e)
        assert out["independent"] is None
        assert "independence_note" in out
        json.dumps(out)
