import itertools
import math
from fractions import Fraction

import pytest

from conpat.core import PatternError, RandomSource, complement, identity, pattern_rank, reverse
from conpat.overlap import (
    bound_breakdown,
    check_lemma_bounds,
    enumerate_good,
    exact_overlap_probability,
    good_count_probe,
    lemma_bound,
    mc_overlap_probability,
    monotone_codes,
)
from oracles import good_patterns, overlap_witnesses, ranks

EXACT_CASES = [(k, l) for k in range(1, 10) for l in range(k) if 2 * k - l <= 10]


def codes(pats):
    return {pattern_rank(p)[1] for p in pats}


def test_exact_examples(backend):
    assert exact_overlap_probability(2, 1).probability == Fraction(2, 6)
    assert exact_overlap_probability(3, 0).probability == Fraction(1, 6)
    st = exact_overlap_probability(4, 2)
    # brute force over S_6: 16 witnesses
    assert (st.numerator, st.denominator) == (16, 720)
    st = exact_overlap_probability(3, 2)
    assert (st.numerator, st.denominator) == (2, 24)


def test_exact_budget():
    with pytest.raises(PatternError, match="enumeration budget exceeded"):
        exact_overlap_probability(6, 1)
    with pytest.raises(PatternError):
        exact_overlap_probability(3, 3)


@pytest.mark.parametrize("k", range(1, 6))
def test_disjoint_probability_is_one_over_k_factorial(k):
    assert exact_overlap_probability(k, 0).probability == Fraction(1, math.factorial(k))


def test_disjoint_gap_does_not_matter():
    # pairs of length-2 windows in S_6 at gaps 0, 1, 2
    for gap in range(3):
        start = 2 + gap
        hits = sum(1 for s in itertools.permutations(range(1, 7)) if ranks(s[:2]) == ranks(s[start : start + 2]))
        assert Fraction(hits, 720) == exact_overlap_probability(2, 0).probability


@pytest.mark.parametrize("k, l", [(k, l) for k, l in EXACT_CASES if 2 * k - l <= 7])
def test_exact_matches_unpruned_oracle(k, l):
    assert exact_overlap_probability(k, l).numerator == len(overlap_witnesses(k, l))
    assert enumerate_good(k, l).members == codes(good_patterns(k, l))


def test_good_examples():
    g = enumerate_good(3, 2)
    assert g.count == 2 and set(g.patterns()) == {(1, 2, 3), (3, 2, 1)}
    assert enumerate_good(3, 0).count == 6
    g = enumerate_good(4, 2)
    assert set(g.patterns()) == {
        (1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2, 3), (2, 1, 4, 3), (2, 3, 1, 4), (2, 4, 1, 3),
        (3, 1, 4, 2), (3, 2, 4, 1), (3, 4, 1, 2), (4, 1, 3, 2), (4, 2, 3, 1), (4, 3, 2, 1),
    }


@pytest.mark.parametrize("k", range(2, 10))
def test_only_monotone_patterns_at_full_overlap(k):
    g = enumerate_good(k, k - 1)
    assert g.members == monotone_codes(k)
    assert all(w == 1 for w in g.witnesses.values())
    st = exact_overlap_probability(k, k - 1)
    assert st.probability == Fraction(2, math.factorial(k + 1))


@pytest.mark.parametrize("k, l", EXACT_CASES)
def test_good_set_closed_under_reverse_complement(k, l):
    g = enumerate_good(k, l)
    pats = g.patterns()
    rc = {pattern_rank(reverse(complement(p)))[1] for p in pats}
    assert rc == set(g.members)
    by_code = g.witnesses
    for p in pats:
        assert by_code[pattern_rank(p)[1]] == by_code[pattern_rank(reverse(complement(p)))[1]]


def test_witness_rc_symmetry_on_permutations():
    for k, l in [(3, 1), (4, 2), (4, 1)]:
        wit = set(overlap_witnesses(k, l))
        assert {reverse(complement(s)) for s in wit} == wit


@pytest.mark.parametrize("k, l", EXACT_CASES)
def test_lemma_bounds_hold_exactly(k, l):
    check = check_lemma_bounds(k, l)
    assert check.mode == "exact"
    assert check.passed, check


def test_lemma_bound_selection():
    assert lemma_bound(4, 0) == ("disjoint", pytest.approx(1 / 24))
    assert lemma_bound(4, 3)[0] == "monotone"
    assert lemma_bound(4, 2) == ("small-overlap", pytest.approx(3.375))
    assert lemma_bound(5, 3) == ("large-overlap", pytest.approx(0.5**1.5, rel=1e-12))
    assert lemma_bound(5, 3)[1] == pytest.approx(0.3536, abs=1e-4)
    assert lemma_bound(8, 4)[0] == "small-overlap"


def test_lemma_check_examples():
    c = check_lemma_bounds(5, 3)
    assert c.passed and c.probability == Fraction(18, 5040)
    c = check_lemma_bounds(3, 2)
    assert c.passed and c.probability == Fraction(1, 12) == Fraction(2, math.factorial(4))
    c = check_lemma_bounds(4, 2)
    assert c.passed and c.bound == pytest.approx(3.375)


def test_lemma_check_falls_back_to_mc():
    c = check_lemma_bounds(8, 5, samples=20_000, rng=RandomSource(1))
    assert c.mode == "monte-carlo" and c.passed


@pytest.mark.slow
@pytest.mark.parametrize("k, l", [(2, 1), (3, 2), (3, 1), (4, 2), (5, 3)])
def test_mc_converges_to_exact(k, l):
    st = mc_overlap_probability(k, l, 10**6, RandomSource(11))
    p = float(exact_overlap_probability(k, l).probability)
    assert abs(st.estimate - p) <= 5 * st.stderr


def test_mc_examples():
    st = mc_overlap_probability(3, 2, 200_000, RandomSource(4))
    assert abs(st.estimate - 1 / 12) <= 5 * st.stderr
    st = mc_overlap_probability(8, 6, 200_000, RandomSource(4))
    assert st.estimate <= 0.125 + 5 * st.stderr
    a = mc_overlap_probability(4, 1, 70_000, RandomSource(4))
    b = mc_overlap_probability(4, 1, 70_000, RandomSource(4))
    assert a == b
    with pytest.raises(PatternError):
        mc_overlap_probability(2, 1, 0, RandomSource(0))


def test_bound_breakdown_formulas():
    bd = bound_breakdown(10, 5)
    assert bd.term_disjoint == pytest.approx(1000 / 120)
    assert bd.z_bound == pytest.approx(6 * 1000 * 0.96**5)
    assert bd.y_bound == pytest.approx(3 * 10**5 * 0.96**5)
    assert bd.term_full_overlap == pytest.approx(2 * 100 / 720)
    assert bd.term_small_overlap == pytest.approx(100 * 5 * 3**5 / 120)
    bd8 = bound_breakdown(10, 8)
    expected = (1 / 2) ** 3 + (1 / 6) ** (5 / 3) + (1 / 24) ** 1
    assert bd8.term_large_overlap == pytest.approx(100 * expected)
    assert [l for l, _, _ in bd8.large_overlap_terms] == [4, 5, 6]
    with pytest.raises(PatternError):
        bound_breakdown(3, 4)


def test_probe_d1_constant():
    t = good_count_probe(1, range(3, 7))
    assert t.counts == (2, 2, 2, 2)
    assert t.vanishes is True


def test_probe_frozen_values():
    # values from the brute-force enumeration oracle
    assert good_count_probe(2, range(3, 9)).counts == (6, 12, 14, 16, 18, 20)
    assert good_count_probe(3, range(4, 8)).counts == (24, 60, 120, 152)
    assert [len(good_patterns(k, k - 2)) for k in (3, 4, 5)] == [6, 12, 14]


def test_probe_omits_over_budget():
    t = good_count_probe(3, range(4, 10))
    assert t.ks == (4, 5, 6, 7) and t.omitted == (8, 9)
