#!/usr/bin/env python3
"""End-to-end walkthrough: registration, ratings, automatic trust, removal.

Runs everything in-process against an in-memory keyserver and prints each
step, including what the verifying client recomputed for itself.
"""

from fractions import Fraction

from amakey.client import AmaClient, InProcessTransport
from amakey.harness import build_world
from amakey.model import (
    TriState,
    TrustPolicy,
    fingerprint,
    format_fingerprint_groups,
    margin_ratio,
)


def main():
    policy = TrustPolicy(2, Fraction(1, 2))
    world = build_world(seed=42)
    victim_address, victim_keypair = world.users["victim"]
    transport = InProcessTransport(world.service)
    viewer = AmaClient(transport, policy=policy)

    print("== registered users ==")
    for name, (address, keypair) in world.users.items():
        fp = format_fingerprint_groups(fingerprint(keypair.public))
        print(f"  {address.value:24s} {fp}")

    print("\n== before any ratings ==")
    report = viewer.fetch_and_validate(victim_address)
    print(f"  outcome: {report.outcome.value}")
    print(f"  attestment: {report.attestment.value}")

    print("\n== three raters watch the attestment and confirm ==")
    for rater in ("rater1", "rater2", "rater3"):
        world.submit_rating(rater, "victim", (TriState.YES, TriState.YES, TriState.YES))
        print(f"  {rater} submitted (yes, yes, yes)")

    report = viewer.fetch_and_validate(victim_address)
    stats = report.recomputed_stats
    print("\n== after ratings ==")
    print(f"  outcome: {report.outcome.value}")
    print(f"  recomputed stats: total={stats.s1} margins "
          f"identity={stats.s2 - stats.s3} hash={stats.s4 - stats.s5} authentic={stats.s6 - stats.s7}")
    ratio = margin_ratio(stats)
    print(f"  agreement ratio: {ratio} (threshold beta={policy.beta})")
    print(f"  verified {report.verified_rating_count} rating signatures via rater lookups")

    owner = AmaClient(transport, policy=policy, keypair=victim_keypair, own_address=victim_address)
    print(f"\n== owner self-check: {owner.self_check().value} ==")

    owner.remove_signed(victim_address)
    report = viewer.fetch_and_validate(victim_address)
    print(f"== after signed removal: {report.outcome.value} ==")


if __name__ == "__main__":
    main()
