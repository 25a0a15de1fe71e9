"""Wire forms for signed payloads and lookup responses.

Signed payloads travel as the exact canonical bytes (base64-wrapped) plus
the detached signature. Receivers verify over the received bytes, so
nothing depends on how a transport re-serializes JSON. Decoders reject
payloads whose bytes are not canonical.
"""

from __future__ import annotations

from ..errors import ValidationError
from ..model import (
    AggregateStats,
    ContactAddress,
    SignedIdentityCard,
    SignedRatingCard,
    SignedRemovalRequest,
    canonical_encode,
    decode_identity_card,
    decode_rating_card,
    decode_removal_request,
    fingerprint,
)
from ..model.encoding import decode_bytes, encode_bytes

STATS_KEYS = ("s1", "s2", "s3", "s4", "s5", "s6", "s7")


def signed_card_to_wire(signed: SignedIdentityCard) -> dict:
    return {
        "card_bytes": encode_bytes(canonical_encode(signed.card)),
        "signature": encode_bytes(signed.signature),
    }


def signed_card_from_wire(obj) -> SignedIdentityCard:
    if not isinstance(obj, dict) or set(obj) != {"card_bytes", "signature"}:
        raise ValidationError("bad_request", "signed card must carry card_bytes and signature")
    card = decode_identity_card(decode_bytes(obj["card_bytes"]))
    return SignedIdentityCard(card, decode_bytes(obj["signature"]))


def signed_rating_to_wire(signed: SignedRatingCard) -> dict:
    return {
        "rating_bytes": encode_bytes(canonical_encode(signed.rating)),
        "signature": encode_bytes(signed.signature),
    }


def signed_rating_from_wire(obj) -> SignedRatingCard:
    if not isinstance(obj, dict) or set(obj) != {"rating_bytes", "signature"}:
        raise ValidationError("bad_request", "signed rating must carry rating_bytes and signature")
    rating = decode_rating_card(decode_bytes(obj["rating_bytes"]))
    return SignedRatingCard(rating, decode_bytes(obj["signature"]))


def signed_removal_to_wire(signed: SignedRemovalRequest) -> dict:
    return {
        "request_bytes": encode_bytes(canonical_encode(signed.request)),
        "signature": encode_bytes(signed.signature),
    }


def signed_removal_from_wire(obj) -> SignedRemovalRequest:
    if not isinstance(obj, dict) or set(obj) != {"request_bytes", "signature"}:
        raise ValidationError("bad_request", "signed removal must carry request_bytes and signature")
    request = decode_removal_request(decode_bytes(obj["request_bytes"]))
    return SignedRemovalRequest(request, decode_bytes(obj["signature"]))


def stats_to_wire(stats: AggregateStats) -> dict:
    return {key: getattr(stats, key) for key in STATS_KEYS}


def stats_from_wire(obj) -> AggregateStats:
    if not isinstance(obj, dict) or set(obj) != set(STATS_KEYS):
        raise ValidationError("bad_request", "stats must carry exactly s1..s7")
    return AggregateStats(*(obj[key] for key in STATS_KEYS))


def address_to_wire(address: ContactAddress) -> dict:
    return {"scheme": address.scheme.value, "value": address.value}


def address_from_wire(obj) -> ContactAddress:
    if not isinstance(obj, dict) or set(obj) != {"scheme", "value"}:
        raise ValidationError("bad_request", "address must carry scheme and value")
    return ContactAddress.parse(obj["value"], scheme=obj["scheme"])


def lookup_response_to_wire(signed_card, ratings, stats) -> dict:
    """Response body for a lookup. The fingerprint is a server convenience
    claim; clients recompute it from the key bytes."""
    return {
        "signed_identity_card": signed_card_to_wire(signed_card),
        "ratings": [signed_rating_to_wire(r) for r in ratings],
        "stats": stats_to_wire(stats),
        "fingerprint": fingerprint(signed_card.card.public_key).digest,
    }
