"""Pure data model: types, canonical encoding, fingerprints, signatures, trust."""

from .cards import (
    sign_identity_card,
    sign_rating_card,
    sign_removal_request,
    verify_identity_card,
    verify_rating_card,
    verify_removal_request,
)
from .encoding import (
    canonical_encode,
    decode_identity_card,
    decode_rating_card,
    decode_removal_request,
    decode_timestamp,
    encode_timestamp,
)
from .fingerprint import fingerprint, format_fingerprint_groups, md5_hex, ungroup_fingerprint
from .keys import (
    ALGORITHM_ED25519,
    ALGORITHM_RSA_PSS,
    DEFAULT_ALGORITHM,
    DeterministicStream,
    KeyExpansionParams,
    Keypair,
    derive_keypair_from_passphrase,
    expand_passphrase,
    generate_keypair,
    known_algorithms,
)
from .trust import aggregate, margin_ratio, min_margin, trust_decision
from .types import (
    AddressScheme,
    AggregateStats,
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    KeyFingerprint,
    Nonce,
    NoncePurpose,
    PublicKeyMaterial,
    RatingCard,
    RemovalRequest,
    SignedIdentityCard,
    SignedRatingCard,
    SignedRemovalRequest,
    TriState,
    TrustDecision,
    TrustPolicy,
    utc_now,
)

__all__ = [
    "ALGORITHM_ED25519",
    "ALGORITHM_RSA_PSS",
    "DEFAULT_ALGORITHM",
    "AddressScheme",
    "AggregateStats",
    "AttestmentKind",
    "AttestmentRef",
    "ContactAddress",
    "DeterministicStream",
    "GuidelineChecklist",
    "IdentityCard",
    "KeyExpansionParams",
    "KeyFingerprint",
    "Keypair",
    "Nonce",
    "NoncePurpose",
    "PublicKeyMaterial",
    "RatingCard",
    "RemovalRequest",
    "SignedIdentityCard",
    "SignedRatingCard",
    "SignedRemovalRequest",
    "TriState",
    "TrustDecision",
    "TrustPolicy",
    "aggregate",
    "canonical_encode",
    "decode_identity_card",
    "decode_rating_card",
    "decode_removal_request",
    "decode_timestamp",
    "derive_keypair_from_passphrase",
    "encode_timestamp",
    "expand_passphrase",
    "fingerprint",
    "format_fingerprint_groups",
    "generate_keypair",
    "known_algorithms",
    "margin_ratio",
    "md5_hex",
    "min_margin",
    "sign_identity_card",
    "sign_rating_card",
    "sign_removal_request",
    "trust_decision",
    "ungroup_fingerprint",
    "utc_now",
    "verify_identity_card",
    "verify_rating_card",
    "verify_removal_request",
]
