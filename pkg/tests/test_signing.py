"""Signature soundness: round trips, wrong keys, and the full single-field
mutation matrix over signed cards and ratings."""

import copy
import random
from datetime import timedelta

import pytest

from amakey.errors import ValidationError
from amakey.model import (
    ALGORITHM_RSA_PSS,
    AttestmentKind,
    ContactAddress,
    RemovalRequest,
    SignedIdentityCard,
    SignedRatingCard,
    TriState,
    sign_identity_card,
    sign_rating_card,
    sign_removal_request,
    verify_identity_card,
    verify_rating_card,
    verify_removal_request,
)
from amakey.model.types import AddressScheme

from conftest import T0, make_card, make_keypair, make_rating, make_signed_card, make_signed_rating


def mutate(value, path: str, new_value):
    """Deep-copy a frozen dataclass tree and force one attribute, bypassing
    validation so even invariant-breaking tampering is representable."""
    clone = copy.deepcopy(value)
    target = clone
    parts = path.split(".")
    for part in parts[:-1]:
        target = getattr(target, part)
    object.__setattr__(target, parts[-1], new_value)
    return clone


def card_mutations(card):
    yield "contact_address.value", "x" + card.contact_address.value
    yield "contact_address.scheme", AddressScheme.OTHER_ID
    yield "public_key.algorithm", "rsa-pss-sha256"
    yield "public_key.key_bytes", bytes([card.public_key.key_bytes[0] ^ 1]) + card.public_key.key_bytes[1:]
    yield "attestment.kind", AttestmentKind.CONTENT_HASH
    yield "attestment.value", card.attestment.value + ".tampered"
    yield "attestment.guideline_checklist.single_take", not card.attestment.guideline_checklist.single_take
    yield "display_name", "Mallory"
    yield "created_at", card.created_at + timedelta(seconds=1)


def rating_mutations(rating):
    yield "q_identity", TriState.NO if rating.q_identity is TriState.YES else TriState.YES
    yield "q_hash_match", TriState.NO if rating.q_hash_match is TriState.YES else TriState.YES
    yield "q_authentic", TriState.NO if rating.q_authentic is TriState.YES else TriState.YES
    yield "comment", rating.comment + "!"
    yield "rater_address.value", "x" + rating.rater_address.value
    yield "subject_card.card.attestment.value", rating.subject_card.card.attestment.value + "x"
    yield "subject_card.signature", b"\x00" + rating.subject_card.signature[1:]
    yield "rated_at", rating.rated_at + timedelta(seconds=1)


def test_identity_card_sign_verify_round_trip():
    assert verify_identity_card(make_signed_card("alice"))


def test_identity_card_rsa_round_trip():
    keypair = make_keypair("alice-rsa", ALGORITHM_RSA_PSS)
    assert verify_identity_card(make_signed_card("alice", keypair))


def test_sign_rejects_mismatched_key():
    card = make_card("alice")
    with pytest.raises(ValidationError):
        sign_identity_card(card, make_keypair("bob"))


def test_flipped_attestment_byte_fails():
    signed = make_signed_card("alice")
    tampered = mutate(signed, "card.attestment.value", signed.card.attestment.value[:-1] + "x")
    assert not verify_identity_card(tampered)


def test_unrelated_key_signature_fails():
    signed = make_signed_card("alice")
    forged = SignedIdentityCard(signed.card, make_keypair("bob").sign(b"whatever"))
    assert not verify_identity_card(forged)


def test_truncated_signature_fails():
    signed = make_signed_card("alice")
    assert not verify_identity_card(SignedIdentityCard(signed.card, signed.signature[:-1]))


def test_invariant_breach_two_addresses_smuggled():
    signed = make_signed_card("alice")
    tampered = mutate(signed, "card.contact_address.value", "alice@example.com,bob@example.com")
    assert not verify_identity_card(tampered)


def test_every_card_field_mutation_fails():
    signed = make_signed_card("alice", display_name="Alice")
    for path, new_value in card_mutations(signed.card):
        tampered = mutate(signed, f"card.{path}", new_value)
        assert not verify_identity_card(tampered), path


def test_rating_round_trip_and_wrong_keys():
    subject = make_signed_card("alice")
    signed = make_signed_rating("bob", subject, comment="fine")
    assert verify_rating_card(signed, make_keypair("bob").public)
    assert not verify_rating_card(signed, make_keypair("alice").public)


def test_rating_answer_flip_fails():
    subject = make_signed_card("alice")
    signed = make_signed_rating("bob", subject)
    tampered = mutate(signed, "rating.q_identity", TriState.NO)
    assert not verify_rating_card(tampered, make_keypair("bob").public)


def test_every_rating_field_mutation_fails():
    subject = make_signed_card("alice")
    signed = make_signed_rating("bob", subject, answers=(TriState.YES, TriState.UNSURE, TriState.NO))
    rater_key = make_keypair("bob").public
    for path, new_value in rating_mutations(signed.rating):
        tampered = mutate(signed, f"rating.{path}", new_value)
        assert not verify_rating_card(tampered, rater_key), path


def test_sign_rating_requires_verifiable_subject():
    subject = make_signed_card("alice")
    broken = mutate(subject, "signature", b"\x00" * len(subject.signature))
    rating = make_rating("bob", subject)
    bad_rating = mutate(rating, "subject_card", broken)
    with pytest.raises(ValidationError):
        sign_rating_card(bad_rating, make_keypair("bob"))


def test_removal_request_round_trip():
    keypair = make_keypair("alice")
    request = RemovalRequest(ContactAddress.parse("alice@example.com"), requested_at=T0)
    signed = sign_removal_request(request, keypair)
    assert verify_removal_request(signed, keypair.public)
    assert not verify_removal_request(signed, make_keypair("bob").public)
    tampered = mutate(signed, "request.address.value", "bob@example.com")
    assert not verify_removal_request(tampered, keypair.public)


def test_randomized_mutation_sweep():
    """Seeded sweep across both mutation matrices plus raw signature damage."""
    rng = random.Random(20260808)
    subject = make_signed_card("alice", display_name="Alice")
    rating = make_signed_rating("bob", subject, answers=(TriState.YES, TriState.UNSURE, TriState.NO))
    rater_key = make_keypair("bob").public
    card_paths = list(card_mutations(subject.card))
    rating_paths = list(rating_mutations(rating.rating))
    for _ in range(300):
        which = rng.randrange(3)
        if which == 0:
            path, new_value = card_paths[rng.randrange(len(card_paths))]
            assert not verify_identity_card(mutate(subject, f"card.{path}", new_value))
        elif which == 1:
            path, new_value = rating_paths[rng.randrange(len(rating_paths))]
            assert not verify_rating_card(mutate(rating, f"rating.{path}", new_value), rater_key)
        else:
            sig = bytearray(subject.signature)
            sig[rng.randrange(len(sig))] ^= 1 << rng.randrange(8)
            assert not verify_identity_card(SignedIdentityCard(subject.card, bytes(sig)))
