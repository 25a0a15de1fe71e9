"""Deterministic adversarial scenarios against the keyserver.

Each scenario builds a scripted world (seeded keypairs, fixed timestamps,
seeded nonces and challenges), wraps the keyserver with one misbehavior,
drives the real client against it through the in-process transport, and
records whether the client caught it. Reports are byte-reproducible for a
given seed.

Behaviors:
    substitute_key      serve an attacker card in place of the target's
    strip_ratings       serve the real card but drop the ratings list
    forge_stats         serve real ratings with inflated aggregate claims
    replay_removed_card serve a card (and its ratings) that was removed
                        and superseded
    impostor_card       the attacker completed registration for the target
                        address with their own key and attestment (the
                        server itself stays honest)
"""

from __future__ import annotations

import csv
import enum
import io
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from pathlib import Path
from .client import AmaClient, CardCache, InProcessTransport, ReportOutcome, SelfCheckResult
from .errors import ValidationError
from .model import (
    ALGORITHM_ED25519,
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    KeyExpansionParams,
    Keypair,
    NoncePurpose,
    SignedIdentityCard,
    SignedRatingCard,
    TriState,
    TrustPolicy,
    derive_keypair_from_passphrase,
    sign_identity_card,
)
from .server import (
    ArithmeticChallengeProvider,
    InMemoryMailbox,
    KeyserverService,
    LookupResult,
    solve_arithmetic_puzzle,
)
from .server.service import DEFAULT_NONCE_TTL

WORLD_SALT = b"amakey-harness-salt!"
WORLD_EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)
# Scenario worlds are simulations; a light expansion keeps hundreds of
# deterministic keypairs cheap without changing any protocol behavior.
WORLD_EXPANSION = KeyExpansionParams(iterations=128)


class BehaviorKind(enum.Enum):
    SUBSTITUTE_KEY = "substitute_key"
    STRIP_RATINGS = "strip_ratings"
    FORGE_STATS = "forge_stats"
    REPLAY_REMOVED_CARD = "replay_removed_card"
    IMPOSTOR_CARD = "impostor_card"


@dataclass(frozen=True)
class AdversarialBehavior:
    kind: BehaviorKind
    target_address: ContactAddress
    payload: dict = field(default_factory=dict)


class MisbehavingService:
    """Wraps a keyserver, applying one behavior to lookups of the target
    address. Every other request passes through honestly."""

    def __init__(self, inner: KeyserverService, behavior: AdversarialBehavior):
        self.inner = inner
        self.behavior = behavior

    def __getattr__(self, name):
        return getattr(self.inner, name)

    def lookup(self, address: ContactAddress) -> LookupResult:
        result = self.inner.lookup(address)
        if address != self.behavior.target_address:
            return result
        kind = self.behavior.kind
        payload = self.behavior.payload
        if kind is BehaviorKind.SUBSTITUTE_KEY:
            substitute: SignedIdentityCard = payload["substitute_card"]
            ratings: list[SignedRatingCard] = payload.get("ratings", [])
            from .model import aggregate

            return LookupResult(substitute, ratings, aggregate([r.rating for r in ratings]))
        if kind is BehaviorKind.STRIP_RATINGS:
            return LookupResult(result.signed_card, [], result.stats)
        if kind is BehaviorKind.FORGE_STATS:
            return LookupResult(result.signed_card, result.ratings, payload["claimed_stats"])
        if kind is BehaviorKind.REPLAY_REMOVED_CARD:
            snapshot: LookupResult = payload["snapshot"]
            return snapshot
        if kind is BehaviorKind.IMPOSTOR_CARD:
            return result  # the server is honest; the registration itself was hijacked
        raise ValidationError("bad_behavior", f"unknown behavior kind: {kind}")


# --- scripted worlds ---------------------------------------------------------------


@dataclass
class World:
    """A deterministic keyserver populated with registered users."""

    seed: int
    service: KeyserverService
    mailbox: InMemoryMailbox
    users: dict[str, tuple[ContactAddress, Keypair]]
    clock_state: dict

    def keypair_for(self, label: str) -> Keypair:
        return derive_keypair_from_passphrase(
            f"world-{self.seed}:{label}", WORLD_SALT, WORLD_EXPANSION, algorithm=ALGORITHM_ED25519
        )

    def make_card(self, address: ContactAddress, keypair: Keypair, label: str) -> SignedIdentityCard:
        card = IdentityCard(
            contact_address=address,
            public_key=keypair.public,
            attestment=AttestmentRef(
                AttestmentKind.HOSTED_URL,
                f"https://videos.example.com/{label}.mp4",
                GuidelineChecklist(single_take=True, id_shown=True, spoken_in_groups=True),
            ),
            display_name=label.title(),
            created_at=self.now(),
        )
        return sign_identity_card(card, keypair)

    def now(self) -> datetime:
        self.clock_state["tick"] += 1
        return WORLD_EPOCH + timedelta(seconds=self.clock_state["tick"])

    def register_user(self, name: str) -> tuple[ContactAddress, Keypair]:
        address = ContactAddress.parse(f"{name}@example.com")
        keypair = self.keypair_for(name)
        signed_card = self.make_card(address, keypair, name)
        self.service.begin_registration(signed_card)
        nonce = self.mailbox.latest_nonce(address, NoncePurpose.REGISTER)
        self.service.confirm_registration(nonce)
        self.users[name] = (address, keypair)
        return address, keypair

    def submit_rating(self, rater: str, subject: str, answers: tuple[TriState, TriState, TriState], comment: str = ""):
        rater_address, rater_keypair = self.users[rater]
        subject_address, _ = self.users[subject]
        client = AmaClient(
            InProcessTransport(self.service),
            policy=TrustPolicy.of(0, Fraction(1, 2)),
            keypair=rater_keypair,
            own_address=rater_address,
        )
        challenge = self.service.issue_challenge()
        client.review_and_rate(
            subject_address, answers, comment, challenge.challenge_id, solve_arithmetic_puzzle(challenge.puzzle)
        )


def build_world(seed: int, users: list[str] | None = None) -> World:
    clock_state = {"tick": 0}

    def clock() -> datetime:
        clock_state["tick"] += 1
        return WORLD_EPOCH + timedelta(seconds=clock_state["tick"])

    mailbox = InMemoryMailbox()
    rng = random.Random(seed)
    service = KeyserverService(
        delivery=mailbox,
        challenges=ArithmeticChallengeProvider(rng=random.Random(seed + 1), clock=clock),
        clock=clock,
        nonce_rng=rng,
        nonce_ttl=DEFAULT_NONCE_TTL,
    )
    world = World(seed=seed, service=service, mailbox=mailbox, users={}, clock_state=clock_state)
    for name in users if users is not None else ["victim", "rater1", "rater2", "rater3"]:
        world.register_user(name)
    return world


# --- scenario execution ---------------------------------------------------------------


@dataclass(frozen=True)
class ProbeOutcome:
    probe: str
    outcome: str
    findings: tuple[str, ...] = ()


@dataclass(frozen=True)
class DetectionReport:
    scenario_id: str
    behavior_kind: str
    policy_alpha: int
    policy_beta: str
    probes: tuple[ProbeOutcome, ...]
    detected: bool

    def to_text(self) -> str:
        lines = [
            f"scenario: {self.scenario_id}",
            f"behavior: {self.behavior_kind}",
            f"policy:   alpha={self.policy_alpha} beta={self.policy_beta}",
            f"detected: {'yes' if self.detected else 'no'}",
        ]
        for probe in self.probes:
            lines.append(f"  {probe.probe}: {probe.outcome}")
            for finding in probe.findings:
                lines.append(f"    - {finding}")
        return "\n".join(lines) + "\n"


def _policy_str(policy: TrustPolicy) -> str:
    return f"{policy.beta.numerator}/{policy.beta.denominator}"


def _fetch_probe(client: AmaClient, address: ContactAddress, name: str = "fetch_and_validate") -> ProbeOutcome:
    report = client.fetch_and_validate(address)
    return ProbeOutcome(
        probe=name,
        outcome=report.outcome.value,
        findings=tuple(f"{f.kind.value}: {f.detail}" for f in report.discrepancies),
    )


DEFAULT_WORLD_USERS = ("victim", "rater1", "rater2", "rater3")

RatingPlan = tuple[str, str, tuple[TriState, TriState, TriState]]


def _apply_ratings(world: World, ratings: tuple[RatingPlan, ...]):
    for rater, subject, answers in ratings:
        world.submit_rating(rater, subject, answers)


def _default_rating_plan(users: tuple[str, ...]) -> tuple[RatingPlan, ...]:
    all_yes = (TriState.YES, TriState.YES, TriState.YES)
    return tuple((name, "victim", all_yes) for name in users if name != "victim")


def run_scenario(
    behavior_kind: BehaviorKind,
    policy: TrustPolicy,
    seed: int = 0,
    *,
    users: tuple[str, ...] | None = None,
    ratings: tuple[RatingPlan, ...] | None = None,
    forged_rating_count: int = 0,
    cache_dir: str | Path | None = None,
) -> DetectionReport:
    """Build the scripted world for one behavior, run the client probes, and
    report whether the client caught the misbehavior.

    The world always contains a user named "victim", the behavior's target.
    """
    scenario_id = f"{behavior_kind.value}-seed{seed}"
    probes: list[ProbeOutcome] = []

    if behavior_kind is BehaviorKind.IMPOSTOR_CARD:
        return _run_impostor(scenario_id, policy, seed, forged_rating_count, users)

    users = tuple(users) if users else DEFAULT_WORLD_USERS
    if "victim" not in users:
        users = ("victim",) + users
    ratings = tuple(ratings) if ratings is not None else _default_rating_plan(users)

    world = build_world(seed, users=list(users))
    victim_address, victim_keypair = world.users["victim"]
    _apply_ratings(world, ratings)

    payload: dict = {}
    target = victim_address
    observer_cache = None

    if behavior_kind is BehaviorKind.SUBSTITUTE_KEY:
        attacker_keypair = world.keypair_for("attacker")
        payload["substitute_card"] = world.make_card(victim_address, attacker_keypair, "attacker")
    elif behavior_kind is BehaviorKind.FORGE_STATS:
        honest = world.service.lookup(victim_address)
        claimed = honest.stats
        from .model import AggregateStats

        payload["claimed_stats"] = AggregateStats(
            claimed.s1 + 7, claimed.s2 + 7, claimed.s3, claimed.s4 + 7, claimed.s5, claimed.s6 + 7, claimed.s7
        )
    elif behavior_kind is BehaviorKind.REPLAY_REMOVED_CARD:
        payload["snapshot"] = world.service.lookup(victim_address)
        # The owner rotates keys: signed removal, then a fresh registration.
        owner = AmaClient(
            InProcessTransport(world.service), policy=policy, keypair=victim_keypair, own_address=victim_address
        )
        owner.remove_signed(victim_address)
        new_keypair = world.keypair_for("victim-rotated")
        new_card = world.make_card(victim_address, new_keypair, "victim")
        world.service.begin_registration(new_card)
        world.service.confirm_registration(world.mailbox.latest_nonce(victim_address, NoncePurpose.REGISTER))
        world.users["victim"] = (victim_address, new_keypair)
        _apply_ratings(world, ratings)
        # An observer fetches honestly and caches the newer card.
        if cache_dir is None:
            import tempfile

            cache_dir = tempfile.mkdtemp(prefix="amakey-harness-cache-")
        observer_cache = CardCache(cache_dir, world.keypair_for("observer"))
        warm_client = AmaClient(InProcessTransport(world.service), policy=policy, cache=observer_cache)
        warm = warm_client.fetch_and_validate(victim_address)
        if warm.outcome is not ReportOutcome.AUTO_TRUSTED:
            observer_cache.put(warm.card)  # explicit confirmation path when policy is strict

    behavior = AdversarialBehavior(behavior_kind, target, payload)
    wrapped = MisbehavingService(world.service, behavior)
    transport = InProcessTransport(wrapped)

    observer = AmaClient(transport, policy=policy, cache=observer_cache)
    probes.append(_fetch_probe(observer, victim_address))

    owner_client = AmaClient(
        transport, policy=policy, keypair=victim_keypair, own_address=victim_address
    )
    if behavior_kind is BehaviorKind.REPLAY_REMOVED_CARD:
        owner_client = AmaClient(
            transport, policy=policy, keypair=world.users["victim"][1], own_address=victim_address
        )
    self_check = owner_client.self_check()
    probes.append(ProbeOutcome("self_check", self_check.value))

    if behavior_kind is BehaviorKind.SUBSTITUTE_KEY:
        detected = self_check is SelfCheckResult.MITM_DETECTED
    else:
        detected = probes[0].outcome == ReportOutcome.INVALID.value
    return DetectionReport(
        scenario_id=scenario_id,
        behavior_kind=behavior_kind.value,
        policy_alpha=policy.alpha,
        policy_beta=_policy_str(policy),
        probes=tuple(probes),
        detected=detected,
    )


def _run_impostor(
    scenario_id: str,
    policy: TrustPolicy,
    seed: int,
    forged_rating_count: int,
    users: tuple[str, ...] | None = None,
) -> DetectionReport:
    """The attacker registered the target address with their own key and
    attestment, optionally backed by sock-puppet raters."""
    if users:
        puppet_names = [name for name in users if name != "victim"]
    else:
        puppet_names = [f"puppet{i}" for i in range(forged_rating_count)]
    world = build_world(seed, users=puppet_names)
    victim_address = ContactAddress.parse("victim@example.com")
    attacker_keypair = world.keypair_for("attacker")
    attacker_card = world.make_card(victim_address, attacker_keypair, "attacker")
    world.service.begin_registration(attacker_card)
    world.service.confirm_registration(world.mailbox.latest_nonce(victim_address, NoncePurpose.REGISTER))
    world.users["victim"] = (victim_address, attacker_keypair)
    for puppet in puppet_names:
        world.submit_rating(puppet, "victim", (TriState.YES, TriState.YES, TriState.YES))

    transport = InProcessTransport(world.service)
    probes = [_fetch_probe(AmaClient(transport, policy=policy), victim_address)]

    # The true owner never registered, but their self-check still exposes the hijack.
    true_owner = AmaClient(
        transport,
        policy=policy,
        keypair=world.keypair_for("true-victim"),
        own_address=victim_address,
    )
    self_check = true_owner.self_check()
    probes.append(ProbeOutcome("self_check_true_owner", self_check.value))

    detected = (
        probes[0].outcome != ReportOutcome.AUTO_TRUSTED.value
        and self_check is SelfCheckResult.MITM_DETECTED
    )
    return DetectionReport(
        scenario_id=scenario_id,
        behavior_kind=BehaviorKind.IMPOSTOR_CARD.value,
        policy_alpha=policy.alpha,
        policy_beta=_policy_str(policy),
        probes=tuple(probes),
        detected=detected,
    )


def run_honest_control(policy: TrustPolicy, seed: int = 0) -> DetectionReport:
    """Same world and probes with no misbehavior: must report nothing."""
    world = build_world(seed)
    victim_address, victim_keypair = world.users["victim"]
    _apply_ratings(world, _default_rating_plan(DEFAULT_WORLD_USERS))
    transport = InProcessTransport(world.service)
    probes = [_fetch_probe(AmaClient(transport, policy=policy), victim_address)]
    owner = AmaClient(transport, policy=policy, keypair=victim_keypair, own_address=victim_address)
    self_check = owner.self_check()
    probes.append(ProbeOutcome("self_check", self_check.value))
    detected = (
        probes[0].outcome == ReportOutcome.INVALID.value or self_check is not SelfCheckResult.CLEAN
    )
    return DetectionReport(
        scenario_id=f"honest-control-seed{seed}",
        behavior_kind="honest_control",
        policy_alpha=policy.alpha,
        policy_beta=_policy_str(policy),
        probes=tuple(probes),
        detected=detected,
    )


def scenario_matrix(policies: list[TrustPolicy], seeds: tuple[int, ...] = (0,)) -> list[DetectionReport]:
    """Every behavior crossed with every policy (and seed)."""
    reports = []
    for seed in seeds:
        for kind in BehaviorKind:
            for policy in policies:
                reports.append(run_scenario(kind, policy, seed))
    return reports


def matrix_to_csv(reports: list[DetectionReport]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["scenario", "behavior", "alpha", "beta", "detected", "probes"])
    for report in reports:
        writer.writerow(
            [
                report.scenario_id,
                report.behavior_kind,
                report.policy_alpha,
                report.policy_beta,
                "yes" if report.detected else "no",
                "; ".join(f"{p.probe}={p.outcome}" for p in report.probes),
            ]
        )
    return out.getvalue()


# --- declarative scenario scripts --------------------------------------------------


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    users: tuple[str, ...]
    ratings: tuple[tuple[str, str, tuple[TriState, TriState, TriState]], ...]
    behavior_kind: BehaviorKind
    alpha: int
    beta: Fraction
    forged_rating_count: int = 0


def parse_scenario_script(text: str) -> ScenarioSpec:
    """Parse the declarative scenario format::

        [world]
        seed = 3
        user victim
        user rater1
        rate rater1 victim yes yes yes
        [behavior]
        kind = forge_stats
        forged_ratings = 0
        [policy]
        alpha = 2
        beta = 1/2
    """
    section = None
    seed = 0
    users: list[str] = []
    ratings: list[tuple[str, str, tuple[TriState, TriState, TriState]]] = []
    kind: BehaviorKind | None = None
    alpha, beta = 2, Fraction(1, 2)
    forged = 0
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("[world]", "[behavior]", "[policy]"):
            section = line
            continue
        if section == "[world]":
            if line.startswith("seed"):
                seed = int(line.split("=", 1)[1])
            elif line.startswith("user "):
                users.append(line.split()[1])
            elif line.startswith("rate "):
                parts = line.split()
                if len(parts) != 6:
                    raise ValueError(f"bad rate line: {raw_line!r}")
                ratings.append((parts[1], parts[2], tuple(TriState(p) for p in parts[3:6])))
            else:
                raise ValueError(f"bad world line: {raw_line!r}")
        elif section == "[behavior]":
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "kind":
                kind = BehaviorKind(value)
            elif key == "forged_ratings":
                forged = int(value)
            else:
                raise ValueError(f"bad behavior line: {raw_line!r}")
        elif section == "[policy]":
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "alpha":
                alpha = int(value)
            elif key == "beta":
                beta = Fraction(value)
            else:
                raise ValueError(f"bad policy line: {raw_line!r}")
        else:
            raise ValueError(f"line outside any section: {raw_line!r}")
    if kind is None:
        raise ValueError("scenario script must set a behavior kind")
    return ScenarioSpec(
        seed=seed,
        users=tuple(users),
        ratings=tuple(ratings),
        behavior_kind=kind,
        alpha=alpha,
        beta=beta,
        forged_rating_count=forged,
    )


def run_script(spec: ScenarioSpec) -> DetectionReport:
    policy = TrustPolicy(spec.alpha, spec.beta)
    return run_scenario(
        spec.behavior_kind,
        policy,
        spec.seed,
        users=spec.users or None,
        ratings=spec.ratings if spec.ratings else None,
        forged_rating_count=spec.forged_rating_count,
    )
