"""Aggregation and the trust rule, checked against independent oracles."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amakey.errors import ValidationError
from amakey.model import (
    AggregateStats,
    TriState,
    TrustDecision,
    TrustPolicy,
    aggregate,
    margin_ratio,
    trust_decision,
)

from conftest import make_rating, make_signed_card

Y, N, U = TriState.YES, TriState.NO, TriState.UNSURE


def counting_oracle(answer_triples):
    """Independent tally: one generator pass per counter."""
    identity = [a for a, _, _ in answer_triples]
    hashes = [b for _, b, _ in answer_triples]
    authentic = [c for _, _, c in answer_triples]
    return (
        len(answer_triples),
        sum(1 for a in identity if a is Y),
        sum(1 for a in identity if a is N),
        sum(1 for b in hashes if b is Y),
        sum(1 for b in hashes if b is N),
        sum(1 for c in authentic if c is Y),
        sum(1 for c in authentic if c is N),
    )


def formula_oracle(stats: AggregateStats, policy: TrustPolicy) -> bool:
    """Direct integer evaluation of the trust inequality, no Fraction type."""
    if stats.s1 == 0:
        return False
    worst = min(stats.s2 - stats.s3, stats.s4 - stats.s5, stats.s6 - stats.s7)
    return policy.alpha < stats.s1 and policy.beta.numerator * stats.s1 < worst * policy.beta.denominator


def build_ratings(answer_triples, subject=None):
    subject = subject or make_signed_card("subject")
    return [make_rating(f"rater{i}", subject, answers=t) for i, t in enumerate(answer_triples)]


def random_triples(rng, n):
    choices = (Y, N, U)
    return [(rng.choice(choices), rng.choice(choices), rng.choice(choices)) for _ in range(n)]


def test_empty_aggregate_is_zero():
    assert aggregate([]).as_tuple() == (0, 0, 0, 0, 0, 0, 0)


def test_worked_example():
    triples = [(Y, Y, Y), (U, Y, N), (N, U, Y)]
    stats = aggregate(build_ratings(triples))
    assert stats.as_tuple() == (3, 1, 1, 2, 0, 2, 1)
    assert stats.as_tuple() == counting_oracle(triples)


def test_random_ratings_match_counting_oracle():
    rng = random.Random(42)
    subject = make_signed_card("subject")
    triples = random_triples(rng, 200)
    assert aggregate(build_ratings(triples, subject)).as_tuple() == counting_oracle(triples)


def test_unsure_counts_only_toward_total():
    stats = aggregate(build_ratings([(U, U, U)] * 4))
    assert stats.as_tuple() == (4, 0, 0, 0, 0, 0, 0)


triple = st.tuples(st.sampled_from([Y, N, U]), st.sampled_from([Y, N, U]), st.sampled_from([Y, N, U]))


@settings(max_examples=100, deadline=None)
@given(st.lists(triple, max_size=30), st.lists(triple, max_size=30))
def test_aggregation_linearity(a, b):
    subject = make_signed_card("subject")
    combined = aggregate(build_ratings(a + b, subject))
    assert combined == aggregate(build_ratings(a, subject)) + aggregate(build_ratings(b, subject))


@settings(max_examples=100, deadline=None)
@given(st.lists(triple, max_size=50))
def test_aggregation_bounds(triples):
    stats = aggregate(build_ratings(triples, make_signed_card("subject")))
    assert stats.s2 + stats.s3 <= stats.s1
    assert stats.s4 + stats.s5 <= stats.s1
    assert stats.s6 + stats.s7 <= stats.s1


def test_stats_validation():
    with pytest.raises(ValidationError):
        AggregateStats(1, 1, 1, 0, 0, 0, 0)
    with pytest.raises(ValidationError):
        AggregateStats(-1, 0, 0, 0, 0, 0, 0)


# --- trust decision ------------------------------------------------------------


def test_no_ratings_is_never_trusted():
    assert trust_decision(AggregateStats(), TrustPolicy(0, Fraction(1, 100))) is TrustDecision.NOT_TRUSTED


def test_trust_examples():
    stats = AggregateStats(10, 9, 0, 9, 1, 8, 0)
    assert margin_ratio(stats) == Fraction(4, 5)
    assert trust_decision(stats, TrustPolicy(5, Fraction(1, 2))) is TrustDecision.TRUSTED
    assert trust_decision(stats, TrustPolicy(5, Fraction(9, 10))) is TrustDecision.NOT_TRUSTED


def test_negative_margin_is_never_trusted():
    stats = AggregateStats(10, 3, 5, 9, 0, 9, 0)
    for beta in (Fraction(1, 100), Fraction(1, 2), Fraction(1)):
        assert trust_decision(stats, TrustPolicy(0, beta)) is TrustDecision.NOT_TRUSTED


def test_alpha_is_strict():
    stats = AggregateStats(3, 3, 0, 3, 0, 3, 0)
    assert trust_decision(stats, TrustPolicy(3, Fraction(1, 2))) is TrustDecision.NOT_TRUSTED
    assert trust_decision(stats, TrustPolicy(2, Fraction(1, 2))) is TrustDecision.TRUSTED


def test_beta_comparison_is_exact():
    # margin ratio exactly equal to beta must not trust (strict inequality)
    stats = AggregateStats(2, 2, 0, 2, 0, 1, 0)  # worst margin 1, ratio 1/2
    assert trust_decision(stats, TrustPolicy(1, Fraction(1, 2))) is TrustDecision.NOT_TRUSTED
    assert trust_decision(stats, TrustPolicy(1, Fraction(49, 100))) is TrustDecision.TRUSTED


def test_policy_bounds():
    with pytest.raises(ValidationError):
        TrustPolicy(-1, Fraction(1, 2))
    with pytest.raises(ValidationError):
        TrustPolicy(0, Fraction(0))
    with pytest.raises(ValidationError):
        TrustPolicy(0, Fraction(3, 2))
    TrustPolicy(0, Fraction(1))  # beta = 1 is allowed


@st.composite
def stats_values(draw):
    s1 = draw(st.integers(min_value=0, max_value=60))
    def pair():
        yes = draw(st.integers(min_value=0, max_value=s1))
        no = draw(st.integers(min_value=0, max_value=s1 - yes))
        return yes, no
    s2, s3 = pair()
    s4, s5 = pair()
    s6, s7 = pair()
    return AggregateStats(s1, s2, s3, s4, s5, s6, s7)


policies = st.builds(
    TrustPolicy,
    st.integers(min_value=0, max_value=20),
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1)),
)


@settings(max_examples=300, deadline=None)
@given(stats_values(), policies)
def test_trust_decision_matches_formula_oracle(stats, policy):
    expected = TrustDecision.TRUSTED if formula_oracle(stats, policy) else TrustDecision.NOT_TRUSTED
    assert trust_decision(stats, policy) is expected


def _add_rating(stats: AggregateStats, answer: TriState) -> AggregateStats:
    bump = 1 if answer is Y else 0
    drop = 1 if answer is N else 0
    return AggregateStats(
        stats.s1 + 1, stats.s2 + bump, stats.s3 + drop, stats.s4 + bump,
        stats.s5 + drop, stats.s6 + bump, stats.s7 + drop,
    )


@settings(max_examples=300, deadline=None)
@given(stats_values(), policies)
def test_trust_monotonicity(stats, policy):
    """With alpha already satisfied, an all-yes rating cannot revoke trust and
    an all-no rating cannot create it."""
    if stats.s1 <= policy.alpha:
        return
    before = trust_decision(stats, policy)
    if before is TrustDecision.TRUSTED:
        assert trust_decision(_add_rating(stats, Y), policy) is TrustDecision.TRUSTED
    else:
        assert trust_decision(_add_rating(stats, N), policy) is TrustDecision.NOT_TRUSTED
