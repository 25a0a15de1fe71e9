"""Canonical byte encoding for signing and wire transport.

Rules, applied identically by every encoder and enforced by every decoder:

* structures encode as JSON with lexicographically sorted keys and no
  insignificant whitespace, serialized as UTF-8;
* every string is NFC-normalized;
* timestamps are RFC 3339 UTC strings at seconds precision;
* binary fields (keys, signatures) are standard base64;
* optional fields are omitted entirely when absent, never null.

Equal values therefore yield identical bytes on every platform, which is
what makes detached signatures over these bytes well-defined.

Decoders are strict: they reject unknown keys, wrong types, and any byte
string that is not already in canonical form.
"""

from __future__ import annotations

import base64
import json
import re
import unicodedata
from datetime import datetime, timezone

from ..errors import ValidationError
from .types import (
    AddressScheme,
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    PublicKeyMaterial,
    RatingCard,
    RemovalRequest,
    SignedIdentityCard,
    TriState,
)

TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$")

IDENTITY_CARD_TYPE = "identity-card"
RATING_CARD_TYPE = "rating-card"
REMOVAL_REQUEST_TYPE = "removal-request"


def encode_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        raise ValidationError("naive_timestamp", "timestamps must be timezone-aware")
    return ts.astimezone(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


def decode_timestamp(text) -> datetime:
    if not isinstance(text, str) or not TIMESTAMP_RE.fullmatch(text):
        raise ValidationError("bad_timestamp", f"not an RFC 3339 UTC seconds timestamp: {text!r}")
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def encode_bytes(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def decode_bytes(text) -> bytes:
    if not isinstance(text, str):
        raise ValidationError("bad_encoding", "expected a base64 string")
    try:
        return base64.b64decode(text, validate=True)
    except Exception as exc:
        raise ValidationError("bad_encoding", f"invalid base64: {exc}") from None


def _normalize_strings(value):
    if isinstance(value, str):
        return unicodedata.normalize("NFC", value)
    if isinstance(value, dict):
        return {_normalize_strings(k): _normalize_strings(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_normalize_strings(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, int):
        return value
    raise ValidationError("bad_encoding", f"type not allowed in canonical structures: {type(value).__name__}")


def canonical_bytes(structure: dict) -> bytes:
    """Serialize a plain structure (str/int/bool/dict/list) to canonical bytes."""
    normalized = _normalize_strings(structure)
    return json.dumps(
        normalized, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def _require_keys(obj, required: set[str], optional: set[str] = frozenset(), what: str = "object") -> None:
    if not isinstance(obj, dict):
        raise ValidationError("bad_encoding", f"{what} must be an object")
    keys = set(obj)
    if not required.issubset(keys) or not keys.issubset(required | optional):
        raise ValidationError("bad_encoding", f"{what} must carry exactly the expected fields")


def _require_str(obj, key: str, what: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValidationError("bad_encoding", f"{what}.{key} must be a string")
    return value


# --- structure builders -----------------------------------------------------

def address_to_struct(address: ContactAddress) -> dict:
    return {"scheme": address.scheme.value, "value": address.value}


def struct_to_address(obj) -> ContactAddress:
    _require_keys(obj, {"scheme", "value"}, what="contact_address")
    scheme = _require_str(obj, "scheme", "contact_address")
    try:
        scheme_enum = AddressScheme(scheme)
    except ValueError:
        raise ValidationError("bad_address", f"unknown address scheme: {scheme!r}") from None
    return ContactAddress(scheme_enum, _require_str(obj, "value", "contact_address"))


def key_to_struct(key: PublicKeyMaterial) -> dict:
    return {"algorithm": key.algorithm, "key": encode_bytes(key.key_bytes)}


def struct_to_key(obj) -> PublicKeyMaterial:
    _require_keys(obj, {"algorithm", "key"}, what="public_key")
    return PublicKeyMaterial(_require_str(obj, "algorithm", "public_key"), decode_bytes(obj["key"]))


def attestment_to_struct(ref: AttestmentRef) -> dict:
    return {
        "guidelines": ref.guideline_checklist.as_dict(),
        "kind": ref.kind.value,
        "value": ref.value,
    }


def struct_to_attestment(obj) -> AttestmentRef:
    _require_keys(obj, {"guidelines", "kind", "value"}, what="attestment")
    kind = _require_str(obj, "kind", "attestment")
    try:
        kind_enum = AttestmentKind(kind)
    except ValueError:
        raise ValidationError("bad_attestment", f"unknown attestment kind: {kind!r}") from None
    checklist = GuidelineChecklist.from_dict(obj["guidelines"])
    return AttestmentRef(kind_enum, _require_str(obj, "value", "attestment"), checklist)


def card_to_struct(card: IdentityCard) -> dict:
    struct = {
        "attestment": attestment_to_struct(card.attestment),
        "contact_address": address_to_struct(card.contact_address),
        "created_at": encode_timestamp(card.created_at),
        "public_key": key_to_struct(card.public_key),
        "type": IDENTITY_CARD_TYPE,
    }
    if card.display_name is not None:
        struct["display_name"] = card.display_name
    return struct


def struct_to_card(obj) -> IdentityCard:
    _require_keys(
        obj,
        {"attestment", "contact_address", "created_at", "public_key", "type"},
        optional={"display_name"},
        what="identity card",
    )
    if obj["type"] != IDENTITY_CARD_TYPE:
        raise ValidationError("bad_encoding", "wrong structure type for an identity card")
    display_name = obj.get("display_name")
    if display_name is not None and not isinstance(display_name, str):
        raise ValidationError("bad_encoding", "display_name must be a string")
    return IdentityCard(
        contact_address=struct_to_address(obj["contact_address"]),
        public_key=struct_to_key(obj["public_key"]),
        attestment=struct_to_attestment(obj["attestment"]),
        display_name=display_name,
        created_at=decode_timestamp(obj["created_at"]),
    )


def signed_card_to_struct(signed: SignedIdentityCard) -> dict:
    return {"card": card_to_struct(signed.card), "signature": encode_bytes(signed.signature)}


def struct_to_signed_card(obj) -> SignedIdentityCard:
    _require_keys(obj, {"card", "signature"}, what="signed card")
    return SignedIdentityCard(struct_to_card(obj["card"]), decode_bytes(obj["signature"]))


def rating_to_struct(rating: RatingCard) -> dict:
    return {
        "answers": {
            "authentic": rating.q_authentic.value,
            "hash_match": rating.q_hash_match.value,
            "identity": rating.q_identity.value,
        },
        "comment": rating.comment,
        "rated_at": encode_timestamp(rating.rated_at),
        "rater_address": address_to_struct(rating.rater_address),
        "subject_card": signed_card_to_struct(rating.subject_card),
        "type": RATING_CARD_TYPE,
    }


def _tri_state(obj, key: str) -> TriState:
    try:
        return TriState(_require_str(obj, key, "answers"))
    except ValueError:
        raise ValidationError("bad_rating", f"answer {key} must be yes/no/unsure") from None


def struct_to_rating(obj) -> RatingCard:
    _require_keys(
        obj,
        {"answers", "comment", "rated_at", "rater_address", "subject_card", "type"},
        what="rating card",
    )
    if obj["type"] != RATING_CARD_TYPE:
        raise ValidationError("bad_encoding", "wrong structure type for a rating card")
    answers = obj["answers"]
    _require_keys(answers, {"authentic", "hash_match", "identity"}, what="answers")
    if not isinstance(obj["comment"], str):
        raise ValidationError("bad_encoding", "comment must be a string")
    return RatingCard(
        q_identity=_tri_state(answers, "identity"),
        q_hash_match=_tri_state(answers, "hash_match"),
        q_authentic=_tri_state(answers, "authentic"),
        comment=obj["comment"],
        rater_address=struct_to_address(obj["rater_address"]),
        subject_card=struct_to_signed_card(obj["subject_card"]),
        rated_at=decode_timestamp(obj["rated_at"]),
    )


def removal_to_struct(request: RemovalRequest) -> dict:
    return {
        "address": address_to_struct(request.address),
        "requested_at": encode_timestamp(request.requested_at),
        "type": REMOVAL_REQUEST_TYPE,
    }


def struct_to_removal(obj) -> RemovalRequest:
    _require_keys(obj, {"address", "requested_at", "type"}, what="removal request")
    if obj["type"] != REMOVAL_REQUEST_TYPE:
        raise ValidationError("bad_encoding", "wrong structure type for a removal request")
    return RemovalRequest(
        address=struct_to_address(obj["address"]),
        requested_at=decode_timestamp(obj["requested_at"]),
    )


# --- public entry points ----------------------------------------------------

def canonical_encode(value) -> bytes:
    """Encode an identity card, rating card, or removal request to canonical bytes."""
    if isinstance(value, IdentityCard):
        return canonical_bytes(card_to_struct(value))
    if isinstance(value, RatingCard):
        return canonical_bytes(rating_to_struct(value))
    if isinstance(value, RemovalRequest):
        return canonical_bytes(removal_to_struct(value))
    raise ValidationError("bad_encoding", f"cannot canonically encode {type(value).__name__}")


def _decode(data: bytes, parse, what: str):
    if not isinstance(data, bytes):
        raise ValidationError("bad_encoding", f"{what} bytes expected")
    try:
        obj = json.loads(data.decode("utf-8"))
    except Exception as exc:
        raise ValidationError("bad_encoding", f"{what} is not valid UTF-8 JSON: {exc}") from None
    value = parse(obj)
    if canonical_encode(value) != data:
        raise ValidationError("not_canonical", f"{what} bytes are not in canonical form")
    return value


def decode_identity_card(data: bytes) -> IdentityCard:
    """Parse canonical identity-card bytes, rejecting non-canonical input."""
    return _decode(data, struct_to_card, "identity card")


def decode_rating_card(data: bytes) -> RatingCard:
    return _decode(data, struct_to_rating, "rating card")


def decode_removal_request(data: bytes) -> RemovalRequest:
    return _decode(data, struct_to_removal, "removal request")
