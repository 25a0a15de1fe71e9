"""Canonical encoding: golden bytes, determinism, strict decoding."""

import random
from datetime import datetime, timezone
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amakey.errors import ValidationError
from amakey.model import (
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    PublicKeyMaterial,
    canonical_encode,
    decode_identity_card,
    decode_rating_card,
    decode_removal_request,
    decode_timestamp,
    encode_timestamp,
)
from amakey.model.types import AddressScheme, RemovalRequest

from conftest import T0, make_card, make_rating, make_signed_card

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_identity_card.bin"
GOLDEN_PHONE_PATH = Path(__file__).parent / "data" / "golden_phone_card.bin"


def golden_card() -> IdentityCard:
    return IdentityCard(
        contact_address=ContactAddress(AddressScheme.EMAIL, "Alice@Example.com "),
        public_key=PublicKeyMaterial("ed25519", bytes(range(32))),
        attestment=AttestmentRef(
            AttestmentKind.HOSTED_URL,
            "https://videos.example.com/alice-attestment.mp4",
            GuidelineChecklist(single_take=True, id_shown=True, spoken_in_groups=True, visual_hash_shown=True),
        ),
        display_name="Alice Example",
        created_at=datetime(2026, 1, 2, 3, 4, 5, tzinfo=timezone.utc),
    )


def golden_phone_card() -> IdentityCard:
    return IdentityCard(
        contact_address=ContactAddress(AddressScheme.PHONE, "+15550100123"),
        public_key=PublicKeyMaterial("rsa-pss-sha256", bytes.fromhex("feedfeeefeedfe")),
        attestment=AttestmentRef(
            AttestmentKind.CONTENT_HASH,
            "9e107d9d372bb6826bd81d3542a419d64bcd891034574d6ac6dcb9e1f2d03ffa",
            GuidelineChecklist(True, True, True, True, True, True, True),
        ),
        created_at=datetime(2026, 3, 4, 5, 6, 7, tzinfo=timezone.utc),
    )


def test_golden_file_byte_equality():
    assert canonical_encode(golden_card()) == GOLDEN_PATH.read_bytes()
    assert canonical_encode(golden_phone_card()) == GOLDEN_PHONE_PATH.read_bytes()


def test_encoding_is_deterministic():
    card = make_card("alice")
    assert canonical_encode(card) == canonical_encode(card)


def test_construction_order_is_irrelevant():
    base = golden_card()
    fields = {
        "contact_address": base.contact_address,
        "public_key": base.public_key,
        "attestment": base.attestment,
        "display_name": base.display_name,
        "created_at": base.created_at,
    }
    expected = canonical_encode(base)
    rng = random.Random(7)
    names = list(fields)
    for _ in range(50):
        rng.shuffle(names)
        rebuilt = IdentityCard(**{name: fields[name] for name in names})
        assert canonical_encode(rebuilt) == expected


def test_strings_are_nfc_normalized():
    # "é" composed vs decomposed must encode identically.
    composed = make_card("alice", display_name="Amélie")
    decomposed = make_card("alice", display_name="Amélie")
    assert canonical_encode(composed) == canonical_encode(decomposed)


def test_display_name_omitted_when_absent():
    card = make_card("alice")
    assert b"display_name" not in canonical_encode(card)


def test_decode_round_trips():
    card = golden_card()
    assert decode_identity_card(canonical_encode(card)) == card
    rating = make_rating("bob", make_signed_card("alice"))
    assert decode_rating_card(canonical_encode(rating)) == rating
    removal = RemovalRequest(ContactAddress.parse("alice@example.com"), requested_at=T0)
    assert decode_removal_request(canonical_encode(removal)) == removal


def test_decoder_rejects_non_canonical_bytes():
    data = canonical_encode(golden_card())
    with_spaces = data.replace(b'","', b'", "')
    with pytest.raises(ValidationError):
        decode_identity_card(with_spaces)


def test_decoder_rejects_unknown_keys():
    data = canonical_encode(golden_card())
    smuggled = data.replace(b'"type":"identity-card"', b'"type":"identity-card","x":"y"')
    with pytest.raises(ValidationError):
        decode_identity_card(smuggled)


def test_decoder_rejects_wrong_type_tag():
    rating = make_rating("bob", make_signed_card("alice"))
    with pytest.raises(ValidationError):
        decode_identity_card(canonical_encode(rating))


def test_timestamps_are_rfc3339_utc_seconds():
    ts = datetime(2026, 6, 7, 8, 9, 10, 123456, tzinfo=timezone.utc)
    assert encode_timestamp(ts) == "2026-06-07T08:09:10Z"
    assert decode_timestamp("2026-06-07T08:09:10Z") == ts.replace(microsecond=0)
    for bad in ("2026-06-07 08:09:10Z", "2026-06-07T08:09:10+00:00", "2026-06-07T08:09:10.5Z", 42):
        with pytest.raises(ValidationError):
            decode_timestamp(bad)


names = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd")), min_size=1, max_size=12
)


@st.composite
def cards(draw):
    label = draw(names)
    value = f"{label}@example.com"
    key_bytes = draw(st.binary(min_size=1, max_size=48))
    display = draw(st.none() | names)
    checklist = GuidelineChecklist(
        single_take=draw(st.booleans()),
        id_shown=draw(st.booleans()),
        horizontally_flipped=draw(st.booleans()),
    )
    return IdentityCard(
        contact_address=ContactAddress(AddressScheme.EMAIL, value),
        public_key=PublicKeyMaterial("ed25519", key_bytes),
        attestment=AttestmentRef(AttestmentKind.HOSTED_URL, f"https://v.example.com/{label}", checklist),
        display_name=display,
        created_at=T0,
    )


@settings(max_examples=150, deadline=None)
@given(cards(), cards())
def test_encoding_injective_on_random_cards(card_a, card_b):
    if card_a == card_b:
        assert canonical_encode(card_a) == canonical_encode(card_b)
    else:
        assert canonical_encode(card_a) != canonical_encode(card_b)


@settings(max_examples=100, deadline=None)
@given(cards())
def test_decode_inverts_encode(card):
    assert decode_identity_card(canonical_encode(card)) == card
