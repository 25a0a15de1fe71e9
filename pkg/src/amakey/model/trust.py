"""Rating aggregation and the automatic-trust decision.

The trust comparison is carried out on exact rationals. A key is trusted
automatically only when there are strictly more than ``alpha`` ratings and
the worst of the three confirm-minus-deny margins, normalized by the total,
strictly exceeds ``beta``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .types import AggregateStats, RatingCard, TriState, TrustDecision, TrustPolicy


def aggregate(ratings: Sequence[RatingCard] | Iterable[RatingCard]) -> AggregateStats:
    """Tally ratings. "unsure" answers count toward the total only."""
    s1 = s2 = s3 = s4 = s5 = s6 = s7 = 0
    for rating in ratings:
        s1 += 1
        if rating.q_identity is TriState.YES:
            s2 += 1
        elif rating.q_identity is TriState.NO:
            s3 += 1
        if rating.q_hash_match is TriState.YES:
            s4 += 1
        elif rating.q_hash_match is TriState.NO:
            s5 += 1
        if rating.q_authentic is TriState.YES:
            s6 += 1
        elif rating.q_authentic is TriState.NO:
            s7 += 1
    return AggregateStats(s1, s2, s3, s4, s5, s6, s7)


def min_margin(stats: AggregateStats) -> int:
    """Worst confirm-minus-deny margin across the three questions."""
    return min(stats.s2 - stats.s3, stats.s4 - stats.s5, stats.s6 - stats.s7)


def margin_ratio(stats: AggregateStats) -> Fraction | None:
    """Normalized worst margin, or None when there are no ratings."""
    if stats.s1 == 0:
        return None
    return Fraction(min_margin(stats), stats.s1)


def trust_decision(stats: AggregateStats, policy: TrustPolicy) -> TrustDecision:
    """Apply the alpha/beta thresholds to aggregated stats.

    With no ratings the decision is NOT_TRUSTED; alpha >= 0 makes that the
    only consistent reading of the strict alpha < total requirement.
    """
    if stats.s1 == 0:
        return TrustDecision.NOT_TRUSTED
    if policy.alpha < stats.s1 and policy.beta < Fraction(min_margin(stats), stats.s1):
        return TrustDecision.TRUSTED
    return TrustDecision.NOT_TRUSTED
