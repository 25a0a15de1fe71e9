"""The verifying client.

The client never takes the keyserver's word for anything it can check
itself: card signatures, rating signatures (via a depth-1 lookup of each
rater's registered key), the aggregate stats, and the key fingerprint are
all recomputed locally. Any discrepancy marks the response Invalid; a
clean response is auto-trusted only when the alpha/beta policy says so,
and otherwise lands on the human-review path with the attestment surfaced.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime

from ..errors import TransportError, ValidationError
from ..model import (
    AggregateStats,
    AttestmentRef,
    ContactAddress,
    KeyFingerprint,
    Keypair,
    PublicKeyMaterial,
    RatingCard,
    SignedIdentityCard,
    SignedRatingCard,
    TriState,
    TrustDecision,
    TrustPolicy,
    aggregate,
    fingerprint,
    sign_rating_card,
    sign_removal_request,
    utc_now,
    verify_identity_card,
    verify_rating_card,
)
from ..model.types import RemovalRequest
from ..server import wire
from .cache import CacheLookup, CardCache
from .transport import ApiResult, Transport

# The three questions a rater answers while watching the attestment.
RATING_QUESTIONS = (
    "Can you recognize the person in this video as the actual owner of the contact address?",
    "Does the hash communicated in the video match the hash given in the identity card?",
    "Does the video meet all mandatory guidelines and appear authentic?",
)


class FindingKind(enum.Enum):
    BAD_CARD_SIGNATURE = "bad-card-signature"
    BAD_RATING_SIGNATURE = "bad-rating-signature"
    SUBJECT_MISMATCH = "subject-mismatch"
    STATS_MISMATCH = "stats-mismatch"
    FINGERPRINT_MISMATCH = "fingerprint-mismatch"
    CACHE_MISMATCH = "cache-mismatch"


@dataclass(frozen=True)
class Finding:
    kind: FindingKind
    detail: str


class ReportOutcome(enum.Enum):
    AUTO_TRUSTED = "auto-trusted"
    NEEDS_HUMAN_REVIEW = "needs-human-review"
    INVALID = "invalid"
    NOT_FOUND = "not-found"


class SelfCheckResult(enum.Enum):
    CLEAN = "clean"
    MITM_DETECTED = "mitm-detected"
    NOT_REGISTERED = "not-registered"


@dataclass(frozen=True)
class RatingDetail:
    """One served rating, with the client's verification verdict."""

    rater: ContactAddress
    answers: tuple[TriState, TriState, TriState]
    comment: str
    rated_at: datetime
    verified: bool
    reason: str | None = None


@dataclass(frozen=True)
class TrustReport:
    outcome: ReportOutcome
    card: SignedIdentityCard | None
    verified_rating_count: int
    recomputed_stats: AggregateStats
    discrepancies: list[Finding]
    server_stats: AggregateStats | None = None
    fingerprint: KeyFingerprint | None = None
    rating_details: list[RatingDetail] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def attestment(self) -> AttestmentRef | None:
        return self.card.card.attestment if self.card is not None else None


def _not_found_report() -> TrustReport:
    return TrustReport(
        outcome=ReportOutcome.NOT_FOUND,
        card=None,
        verified_rating_count=0,
        recomputed_stats=AggregateStats(),
        discrepancies=[],
    )


class AmaClient:
    def __init__(
        self,
        transport: Transport,
        *,
        policy: TrustPolicy,
        keypair: Keypair | None = None,
        own_address: ContactAddress | None = None,
        cache: CardCache | None = None,
        anonymous_transport: Transport | None = None,
    ):
        self.transport = transport
        self.policy = policy
        self.keypair = keypair
        self.own_address = own_address
        self.cache = cache
        self.anonymous_transport = anonymous_transport

    # -- raw lookups -----------------------------------------------------------

    def _lookup_raw(self, address: ContactAddress, transport: Transport | None = None) -> ApiResult:
        transport = transport or self.transport
        result = transport.get(
            "/v1/lookup", {"address": address.value, "scheme": address.scheme.value}
        )
        if result.status not in (200, 404):
            raise TransportError(f"lookup returned unexpected status {result.status}")
        return result

    def _fetch_rater_key(self, rater: ContactAddress) -> PublicKeyMaterial | None:
        """Depth-1 rater lookup: fetch and self-verify the rater's card, nothing more."""
        result = self._lookup_raw(rater)
        if result.status != 200:
            return None
        try:
            signed_card = wire.signed_card_from_wire(result.body.get("signed_identity_card"))
        except ValidationError:
            return None
        if not verify_identity_card(signed_card):
            return None
        if signed_card.card.contact_address != rater:
            return None
        return signed_card.card.public_key

    # -- fetch_and_validate ------------------------------------------------------

    def fetch_and_validate(self, address: ContactAddress, policy: TrustPolicy | None = None) -> TrustReport:
        policy = policy or self.policy
        result = self._lookup_raw(address)
        if result.status == 404:
            return _not_found_report()

        findings: list[Finding] = []
        warnings: list[str] = []

        try:
            signed_card = wire.signed_card_from_wire(result.body.get("signed_identity_card"))
        except ValidationError as exc:
            findings.append(Finding(FindingKind.BAD_CARD_SIGNATURE, f"card unparseable: {exc.detail}"))
            return TrustReport(ReportOutcome.INVALID, None, 0, AggregateStats(), findings)

        if not verify_identity_card(signed_card):
            findings.append(Finding(FindingKind.BAD_CARD_SIGNATURE, "card self-signature does not verify"))
        if signed_card.card.contact_address != address:
            findings.append(
                Finding(FindingKind.BAD_CARD_SIGNATURE, "served card is bound to a different address")
            )

        recomputed_fp = fingerprint(signed_card.card.public_key)
        claimed_fp = result.body.get("fingerprint")
        if claimed_fp != recomputed_fp.digest:
            findings.append(
                Finding(
                    FindingKind.FINGERPRINT_MISMATCH,
                    f"server claimed {claimed_fp!r}, recomputed {recomputed_fp.digest}",
                )
            )

        details: list[RatingDetail] = []
        verified_ratings: list[RatingCard] = []
        rater_keys: dict[str, PublicKeyMaterial | None] = {}
        served_ratings = result.body.get("ratings")
        if not isinstance(served_ratings, list):
            served_ratings = []
            findings.append(Finding(FindingKind.STATS_MISMATCH, "ratings list missing from response"))
        for obj in served_ratings:
            try:
                signed_rating = wire.signed_rating_from_wire(obj)
            except ValidationError as exc:
                findings.append(Finding(FindingKind.BAD_RATING_SIGNATURE, f"rating unparseable: {exc.detail}"))
                continue
            rating = signed_rating.rating
            detail = self._verify_rating(signed_rating, signed_card, rater_keys)
            details.append(detail)
            if detail.verified:
                verified_ratings.append(rating)
            else:
                kind = (
                    FindingKind.SUBJECT_MISMATCH
                    if detail.reason == "embedded subject card differs from the served card"
                    else FindingKind.BAD_RATING_SIGNATURE
                )
                findings.append(Finding(kind, f"rating by {rating.rater_address.value}: {detail.reason}"))

        recomputed_stats = aggregate(verified_ratings)
        server_stats: AggregateStats | None = None
        try:
            server_stats = wire.stats_from_wire(result.body.get("stats"))
        except ValidationError as exc:
            findings.append(Finding(FindingKind.STATS_MISMATCH, f"stats malformed: {exc.detail}"))
        if server_stats is not None and server_stats != recomputed_stats:
            findings.append(
                Finding(
                    FindingKind.STATS_MISMATCH,
                    f"server claimed {server_stats.as_tuple()}, recomputed {recomputed_stats.as_tuple()}",
                )
            )

        self._check_cache(address, signed_card, findings, warnings)

        if findings:
            outcome = ReportOutcome.INVALID
        elif self._decide(recomputed_stats, policy) is TrustDecision.TRUSTED:
            outcome = ReportOutcome.AUTO_TRUSTED
        else:
            outcome = ReportOutcome.NEEDS_HUMAN_REVIEW
        report = TrustReport(
            outcome=outcome,
            card=signed_card,
            verified_rating_count=len(verified_ratings),
            recomputed_stats=recomputed_stats,
            discrepancies=findings,
            server_stats=server_stats,
            fingerprint=recomputed_fp,
            rating_details=details,
            warnings=warnings,
        )
        if report.outcome is ReportOutcome.AUTO_TRUSTED and self.cache is not None:
            self.cache.put(signed_card)
        return report

    def _decide(self, stats: AggregateStats, policy: TrustPolicy) -> TrustDecision:
        from ..model import trust_decision

        return trust_decision(stats, policy)

    def _verify_rating(
        self,
        signed_rating: SignedRatingCard,
        served_card: SignedIdentityCard,
        rater_keys: dict[str, PublicKeyMaterial | None],
    ) -> RatingDetail:
        rating = signed_rating.rating
        base = dict(
            rater=rating.rater_address,
            answers=rating.answers,
            comment=rating.comment,
            rated_at=rating.rated_at,
        )
        if (
            rating.subject_card.card != served_card.card
            or rating.subject_card.signature != served_card.signature
        ):
            return RatingDetail(
                **base, verified=False, reason="embedded subject card differs from the served card"
            )
        key = rating.rater_address.key()
        if key not in rater_keys:
            rater_keys[key] = self._fetch_rater_key(rating.rater_address)
        rater_key = rater_keys[key]
        if rater_key is None:
            return RatingDetail(**base, verified=False, reason="rater has no verifiable registration")
        if not verify_rating_card(signed_rating, rater_key):
            return RatingDetail(
                **base, verified=False, reason="signature does not verify under the rater's key"
            )
        return RatingDetail(**base, verified=True)

    def _check_cache(
        self,
        address: ContactAddress,
        served: SignedIdentityCard,
        findings: list[Finding],
        warnings: list[str],
    ) -> None:
        """Compare the served card against the locally counter-signed cache.

        A served card older than the cached one is a downgrade (a removed
        card being replayed) and counts as a discrepancy. A newer card is a
        legitimate-looking rotation: noted as a warning so the human path
        can re-review, but not held against the server.
        """
        if self.cache is None:
            return
        lookup: CacheLookup = self.cache.get(address)
        if lookup.tampered:
            warnings.append("local cache entry failed verification and was ignored")
            return
        if lookup.entry is None:
            return
        cached = lookup.entry.signed_card
        if cached.card == served.card and cached.signature == served.signature:
            return
        if served.card.created_at <= cached.card.created_at:
            findings.append(
                Finding(
                    FindingKind.CACHE_MISMATCH,
                    "served card is not newer than the locally cached card for this address",
                )
            )
        else:
            warnings.append("key changed since it was cached; re-review the attestment before trusting")

    # -- rating submission --------------------------------------------------------

    def fetch_challenge(self) -> tuple[str, str]:
        result = self.transport.get("/v1/challenge")
        if result.status != 200:
            raise TransportError(f"challenge endpoint returned {result.status}")
        return result.body["challenge_id"], result.body["puzzle"]

    def review_and_rate(
        self,
        address: ContactAddress,
        answers: tuple[TriState, TriState, TriState],
        comment: str,
        challenge_id: str,
        challenge_answer: str,
        subject_card: SignedIdentityCard | None = None,
    ) -> dict:
        """Build, sign, and submit a rating of the card currently served for address.

        Server rejections surface verbatim as ValidationError(code, detail).
        """
        if self.keypair is None or self.own_address is None:
            raise ValidationError("no_identity", "rating requires a local keypair and own address")
        if subject_card is None:
            result = self._lookup_raw(address)
            if result.status == 404:
                raise ValidationError("not_found", f"no card registered for {address.value}")
            subject_card = wire.signed_card_from_wire(result.body.get("signed_identity_card"))
        if not verify_identity_card(subject_card):
            raise ValidationError("bad_signature", "subject card does not verify; refusing to rate it")
        rating = RatingCard(
            q_identity=answers[0],
            q_hash_match=answers[1],
            q_authentic=answers[2],
            comment=comment,
            rater_address=self.own_address,
            subject_card=subject_card,
            rated_at=utc_now(),
        )
        signed_rating = sign_rating_card(rating, self.keypair)
        result = self.transport.post(
            "/v1/rating",
            {
                "signed_rating_card": wire.signed_rating_to_wire(signed_rating),
                "challenge_id": challenge_id,
                "challenge_answer": challenge_answer,
            },
        )
        if result.status != 201:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "rating rejected")
            )
        return result.body

    # -- registration and removal ---------------------------------------------------

    def register(self, signed_card: SignedIdentityCard) -> dict:
        result = self.transport.post(
            "/v1/register", {"signed_identity_card": wire.signed_card_to_wire(signed_card)}
        )
        if result.status != 202:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "registration rejected")
            )
        return result.body

    def confirm_registration(self, nonce: str) -> dict:
        result = self.transport.get("/v1/verify", {"nonce": nonce})
        if result.status != 200:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "nonce rejected")
            )
        return result.body

    def remove_signed(self, address: ContactAddress) -> dict:
        if self.keypair is None:
            raise ValidationError("no_identity", "removal requires the local keypair")
        signed = sign_removal_request(RemovalRequest(address), self.keypair)
        result = self.transport.post(
            "/v1/remove",
            {"address": wire.address_to_wire(address), "signed_removal_request": wire.signed_removal_to_wire(signed)},
        )
        if result.status != 200:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "removal rejected")
            )
        return result.body

    def begin_removal_by_address(self, address: ContactAddress) -> dict:
        result = self.transport.post("/v1/remove/begin", {"address": wire.address_to_wire(address)})
        if result.status != 202:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "removal rejected")
            )
        return result.body

    def confirm_removal(self, nonce: str) -> dict:
        result = self.transport.post("/v1/remove/confirm", {"nonce": nonce})
        if result.status != 200:
            raise ValidationError(
                result.body.get("error", "rejected"), result.body.get("detail", "nonce rejected")
            )
        return result.body

    # -- self-check -----------------------------------------------------------------

    def self_check(
        self,
        own_address: ContactAddress | None = None,
        own_public_key: PublicKeyMaterial | None = None,
    ) -> SelfCheckResult:
        """Anonymously look up our own address and compare the served key bytes.

        Any difference from our actual public key means someone is being
        served a substitute; transport failures raise instead of guessing.
        """
        address = own_address or self.own_address
        key = own_public_key or (self.keypair.public if self.keypair else None)
        if address is None or key is None:
            raise ValidationError("no_identity", "self-check requires an address and public key")
        transport = self.anonymous_transport or self.transport
        result = self._lookup_raw(address, transport)
        if result.status == 404:
            return SelfCheckResult.NOT_REGISTERED
        try:
            signed_card = wire.signed_card_from_wire(result.body.get("signed_identity_card"))
        except ValidationError:
            return SelfCheckResult.MITM_DETECTED
        served = signed_card.card.public_key
        if served.algorithm == key.algorithm and served.key_bytes == key.key_bytes:
            return SelfCheckResult.CLEAN
        return SelfCheckResult.MITM_DETECTED

    # -- cache ------------------------------------------------------------------------

    def cache_put(self, signed_card: SignedIdentityCard):
        if self.cache is None:
            raise ValidationError("no_cache", "no cache directory configured")
        return self.cache.put(signed_card)

    def cache_get(self, address: ContactAddress) -> CacheLookup:
        if self.cache is None:
            raise ValidationError("no_cache", "no cache directory configured")
        return self.cache.get(address)
