"""Core value types: addresses, key material, identity cards, ratings, trust policy.

Everything here is an immutable value. Constructors normalize and validate;
the same validation functions are re-run by the verify operations so that
values tampered with after construction are still rejected.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from urllib.parse import urlparse

from ..errors import ValidationError

HEX_RE = re.compile(r"^[0-9a-f]+$")
FINGERPRINT_RE = re.compile(r"^[0-9a-f]{32}$")
NONCE_RE = re.compile(r"^[0-9a-f]{32}$")


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def as_utc_seconds(ts: datetime) -> datetime:
    """Convert an aware datetime to UTC at seconds precision."""
    if ts.tzinfo is None:
        raise ValidationError("naive_timestamp", "timestamps must be timezone-aware")
    return ts.astimezone(timezone.utc).replace(microsecond=0)


class AddressScheme(enum.Enum):
    EMAIL = "email"
    PHONE = "phone"
    OTHER_ID = "other-id"


def normalize_address_value(value: str) -> str:
    """NFC-normalize, trim, and lowercase until a fixpoint is reached.

    Iterating guarantees idempotence even for the rare code points where
    lowercasing changes the normalization form.
    """
    current = value
    for _ in range(8):
        candidate = unicodedata.normalize("NFC", current).strip().lower()
        if candidate == current:
            break
        current = candidate
    return current


def validate_contact_address(address: "ContactAddress") -> None:
    if not isinstance(address.scheme, AddressScheme):
        raise ValidationError("bad_address", "unknown address scheme")
    value = address.value
    if not isinstance(value, str) or not value:
        raise ValidationError("bad_address", "address value must be a non-empty string")
    if value != normalize_address_value(value):
        raise ValidationError("bad_address", "address value is not in normalized form")
    if address.scheme is AddressScheme.EMAIL:
        if value.count("@") != 1:
            raise ValidationError("bad_address", "email must contain exactly one '@'")
        local, domain = value.split("@")
        if not local or not domain:
            raise ValidationError("bad_address", "email local part and domain must be non-empty")


@dataclass(frozen=True)
class ContactAddress:
    """One contact address. Two addresses are equal iff their normalized forms are byte-equal."""

    scheme: AddressScheme
    value: str

    def __post_init__(self):
        object.__setattr__(self, "value", normalize_address_value(self.value))
        validate_contact_address(self)

    @classmethod
    def parse(cls, text: str, scheme: str | None = None) -> "ContactAddress":
        """Build an address from a bare string, inferring the scheme when not given.

        Inference: exactly one '@' means email; an optional '+' followed by
        digits means phone; anything else is an opaque identifier.
        """
        if scheme is not None:
            return cls(AddressScheme(scheme), text)
        candidate = normalize_address_value(text)
        if candidate.count("@") == 1:
            return cls(AddressScheme.EMAIL, text)
        if re.fullmatch(r"\+?[0-9][0-9 \-]*", candidate):
            return cls(AddressScheme.PHONE, text)
        return cls(AddressScheme.OTHER_ID, text)

    def key(self) -> str:
        """Stable storage/lookup key."""
        return f"{self.scheme.value}:{self.value}"

    def __str__(self) -> str:
        return self.value


def validate_public_key_material(key: "PublicKeyMaterial") -> None:
    if not isinstance(key.algorithm, str) or not key.algorithm:
        raise ValidationError("bad_key", "algorithm identifier must be a non-empty string")
    if not isinstance(key.key_bytes, bytes) or not key.key_bytes:
        raise ValidationError("bad_key", "key_bytes must be non-empty")


@dataclass(frozen=True)
class PublicKeyMaterial:
    """A public key in its canonical encoding for the named algorithm."""

    algorithm: str
    key_bytes: bytes

    def __post_init__(self):
        validate_public_key_material(self)


@dataclass(frozen=True)
class KeyFingerprint:
    """128-bit key digest rendered as 32 lowercase hex characters."""

    digest: str

    def __post_init__(self):
        if not isinstance(self.digest, str) or not FINGERPRINT_RE.fullmatch(self.digest):
            raise ValidationError("bad_fingerprint", "fingerprint must be 32 lowercase hex characters")

    def __str__(self) -> str:
        return self.digest


class AttestmentKind(enum.Enum):
    CONTENT_HASH = "content-hash"
    HOSTED_URL = "hosted-url"


# Wire names for the recording-guideline flags, in canonical (sorted) order
# wherever a full checklist is rendered.
GUIDELINE_FLAGS = (
    "single-take",
    "id-shown",
    "spoken-in-groups",
    "background-audio",
    "visual-hash-shown",
    "card-rotated-or-glass-written",
    "horizontally-flipped",
)


@dataclass(frozen=True)
class GuidelineChecklist:
    """Self-declared flags describing how the attestment video was recorded."""

    single_take: bool = False
    id_shown: bool = False
    spoken_in_groups: bool = False
    background_audio: bool = False
    visual_hash_shown: bool = False
    card_rotated_or_glass_written: bool = False
    horizontally_flipped: bool = False

    def as_dict(self) -> dict[str, bool]:
        return {
            "single-take": self.single_take,
            "id-shown": self.id_shown,
            "spoken-in-groups": self.spoken_in_groups,
            "background-audio": self.background_audio,
            "visual-hash-shown": self.visual_hash_shown,
            "card-rotated-or-glass-written": self.card_rotated_or_glass_written,
            "horizontally-flipped": self.horizontally_flipped,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GuidelineChecklist":
        if not isinstance(data, dict) or set(data) != set(GUIDELINE_FLAGS):
            raise ValidationError("bad_attestment", "guideline checklist must carry exactly the known flags")
        if not all(isinstance(v, bool) for v in data.values()):
            raise ValidationError("bad_attestment", "guideline flags must be booleans")
        return cls(
            single_take=data["single-take"],
            id_shown=data["id-shown"],
            spoken_in_groups=data["spoken-in-groups"],
            background_audio=data["background-audio"],
            visual_hash_shown=data["visual-hash-shown"],
            card_rotated_or_glass_written=data["card-rotated-or-glass-written"],
            horizontally_flipped=data["horizontally-flipped"],
        )


def validate_attestment_ref(ref: "AttestmentRef") -> None:
    if not isinstance(ref.kind, AttestmentKind):
        raise ValidationError("bad_attestment", "unknown attestment kind")
    if not isinstance(ref.value, str) or not ref.value:
        raise ValidationError("bad_attestment", "attestment value must be a non-empty string")
    if ref.kind is AttestmentKind.CONTENT_HASH:
        if not HEX_RE.fullmatch(ref.value):
            raise ValidationError("bad_attestment", "content-hash value must be lowercase hex")
    else:
        parsed = urlparse(ref.value)
        if not parsed.scheme or not parsed.netloc:
            raise ValidationError("bad_attestment", "hosted-url value must be an absolute URL")
    if not isinstance(ref.guideline_checklist, GuidelineChecklist):
        raise ValidationError("bad_attestment", "guideline checklist missing")


@dataclass(frozen=True)
class AttestmentRef:
    """Reference to the owner's attestment video: a content digest or a hosting URL."""

    kind: AttestmentKind
    value: str
    guideline_checklist: GuidelineChecklist = field(default_factory=GuidelineChecklist)

    def __post_init__(self):
        validate_attestment_ref(self)


def validate_identity_card(card: "IdentityCard") -> None:
    validate_contact_address(card.contact_address)
    validate_public_key_material(card.public_key)
    validate_attestment_ref(card.attestment)
    if card.display_name is not None and (not isinstance(card.display_name, str) or not card.display_name):
        raise ValidationError("bad_card", "display_name must be a non-empty string when present")
    if not isinstance(card.created_at, datetime) or card.created_at.tzinfo is None:
        raise ValidationError("bad_card", "created_at must be an aware datetime")


@dataclass(frozen=True)
class IdentityCard:
    """Binds exactly one contact address to a public key and an attestment reference."""

    contact_address: ContactAddress
    public_key: PublicKeyMaterial
    attestment: AttestmentRef
    display_name: str | None = None
    created_at: datetime = field(default_factory=utc_now)

    def __post_init__(self):
        object.__setattr__(self, "created_at", as_utc_seconds(self.created_at))
        validate_identity_card(self)


@dataclass(frozen=True)
class SignedIdentityCard:
    """An identity card plus the owner's signature over its canonical bytes."""

    card: IdentityCard
    signature: bytes

    def __post_init__(self):
        if not isinstance(self.signature, bytes) or not self.signature:
            raise ValidationError("bad_signature", "signature must be non-empty bytes")


class TriState(enum.Enum):
    YES = "yes"
    NO = "no"
    UNSURE = "unsure"


def validate_rating_card(rating: "RatingCard") -> None:
    for answer in (rating.q_identity, rating.q_hash_match, rating.q_authentic):
        if not isinstance(answer, TriState):
            raise ValidationError("bad_rating", "all three answers must be yes/no/unsure")
    if not isinstance(rating.comment, str):
        raise ValidationError("bad_rating", "comment must be a string")
    validate_contact_address(rating.rater_address)
    if not isinstance(rating.subject_card, SignedIdentityCard):
        raise ValidationError("bad_rating", "subject_card must be a signed identity card")
    validate_identity_card(rating.subject_card.card)
    if not isinstance(rating.rated_at, datetime) or rating.rated_at.tzinfo is None:
        raise ValidationError("bad_rating", "rated_at must be an aware datetime")


@dataclass(frozen=True)
class RatingCard:
    """One user's three answers about another user's attestment.

    The rated card is embedded whole so the rating is bound to the exact
    card the rater saw, not to whatever the server stores later.
    """

    q_identity: TriState
    q_hash_match: TriState
    q_authentic: TriState
    comment: str
    rater_address: ContactAddress
    subject_card: SignedIdentityCard
    rated_at: datetime = field(default_factory=utc_now)

    def __post_init__(self):
        object.__setattr__(self, "rated_at", as_utc_seconds(self.rated_at))
        validate_rating_card(self)

    @property
    def answers(self) -> tuple[TriState, TriState, TriState]:
        return (self.q_identity, self.q_hash_match, self.q_authentic)


@dataclass(frozen=True)
class SignedRatingCard:
    """A rating card plus the rater's signature over its canonical bytes."""

    rating: RatingCard
    signature: bytes

    def __post_init__(self):
        if not isinstance(self.signature, bytes) or not self.signature:
            raise ValidationError("bad_signature", "signature must be non-empty bytes")


@dataclass(frozen=True)
class RemovalRequest:
    """Request to delete the registration for an address, signed with the key on file."""

    address: ContactAddress
    requested_at: datetime = field(default_factory=utc_now)

    def __post_init__(self):
        object.__setattr__(self, "requested_at", as_utc_seconds(self.requested_at))
        validate_contact_address(self.address)


@dataclass(frozen=True)
class SignedRemovalRequest:
    request: RemovalRequest
    signature: bytes

    def __post_init__(self):
        if not isinstance(self.signature, bytes) or not self.signature:
            raise ValidationError("bad_signature", "signature must be non-empty bytes")


def validate_aggregate_stats(stats: "AggregateStats") -> None:
    values = (stats.s1, stats.s2, stats.s3, stats.s4, stats.s5, stats.s6, stats.s7)
    for v in values:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValidationError("bad_stats", "counts must be non-negative integers")
    if stats.s2 + stats.s3 > stats.s1 or stats.s4 + stats.s5 > stats.s1 or stats.s6 + stats.s7 > stats.s1:
        raise ValidationError("bad_stats", "confirm/deny counts cannot exceed the total")


@dataclass(frozen=True)
class AggregateStats:
    """Rating tallies: total, then confirm/deny pairs for identity, hash, authenticity.

    An "unsure" answer contributes to the total only.
    """

    s1: int = 0
    s2: int = 0
    s3: int = 0
    s4: int = 0
    s5: int = 0
    s6: int = 0
    s7: int = 0

    def __post_init__(self):
        validate_aggregate_stats(self)

    def __add__(self, other: "AggregateStats") -> "AggregateStats":
        return AggregateStats(
            self.s1 + other.s1,
            self.s2 + other.s2,
            self.s3 + other.s3,
            self.s4 + other.s4,
            self.s5 + other.s5,
            self.s6 + other.s6,
            self.s7 + other.s7,
        )

    def as_tuple(self) -> tuple[int, int, int, int, int, int, int]:
        return (self.s1, self.s2, self.s3, self.s4, self.s5, self.s6, self.s7)


@dataclass(frozen=True)
class TrustPolicy:
    """Client thresholds for automatic trust.

    ``alpha`` is the minimum rating count (strict: trusted requires more
    than alpha ratings). ``beta`` is the minimum normalized agreement
    margin, held as an exact rational in (0, 1].
    """

    alpha: int
    beta: Fraction

    def __post_init__(self):
        if not isinstance(self.alpha, int) or isinstance(self.alpha, bool) or self.alpha < 0:
            raise ValidationError("bad_policy", "alpha must be an integer >= 0")
        if not isinstance(self.beta, Fraction) or not (0 < self.beta <= 1):
            raise ValidationError("bad_policy", "beta must be a Fraction in (0, 1]")

    @classmethod
    def of(cls, alpha: int, beta) -> "TrustPolicy":
        """Accepts beta as a Fraction, int, or exact string like '1/2' or '0.5'."""
        if not isinstance(beta, Fraction):
            beta = Fraction(str(beta))
        return cls(alpha, beta)


class TrustDecision(enum.Enum):
    TRUSTED = "trusted"
    NOT_TRUSTED = "not-trusted"


class NoncePurpose(enum.Enum):
    REGISTER = "register"
    REMOVE = "remove"


@dataclass(frozen=True)
class Nonce:
    """Single-use 128-bit hex token proving control of a contact address."""

    value: str
    issued_at: datetime
    purpose: NoncePurpose

    def __post_init__(self):
        if not isinstance(self.value, str) or not NONCE_RE.fullmatch(self.value):
            raise ValidationError("bad_nonce", "nonce must be 32 lowercase hex characters")
        if not isinstance(self.purpose, NoncePurpose):
            raise ValidationError("bad_nonce", "unknown nonce purpose")
        object.__setattr__(self, "issued_at", as_utc_seconds(self.issued_at))
