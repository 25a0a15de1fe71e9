"""Shared fixtures: cheap deterministic keypairs, card builders, and a
populated in-memory keyserver."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from amakey.model import (
    ALGORITHM_ED25519,
    AttestmentKind,
    AttestmentRef,
    ContactAddress,
    GuidelineChecklist,
    IdentityCard,
    KeyExpansionParams,
    RatingCard,
    TriState,
    derive_keypair_from_passphrase,
    sign_identity_card,
    sign_rating_card,
)

TEST_SALT = b"amakey-test-salt-16b"
FAST_PARAMS = KeyExpansionParams(iterations=64)
T0 = datetime(2026, 1, 2, 3, 4, 5, tzinfo=timezone.utc)

_keypair_cache: dict[tuple[str, str, int], object] = {}


def make_keypair(label: str, algorithm: str = ALGORITHM_ED25519, rsa_bits: int = 1024):
    key = (label, algorithm, rsa_bits)
    if key not in _keypair_cache:
        _keypair_cache[key] = derive_keypair_from_passphrase(
            f"test:{label}", TEST_SALT, FAST_PARAMS, algorithm=algorithm, rsa_bits=rsa_bits
        )
    return _keypair_cache[key]


def make_card(label: str, keypair=None, *, display_name=None, created_at=T0, attestment=None):
    keypair = keypair or make_keypair(label)
    card = IdentityCard(
        contact_address=ContactAddress.parse(f"{label}@example.com"),
        public_key=keypair.public,
        attestment=attestment
        or AttestmentRef(
            AttestmentKind.HOSTED_URL,
            f"https://videos.example.com/{label}.mp4",
            GuidelineChecklist(single_take=True, id_shown=True, spoken_in_groups=True),
        ),
        display_name=display_name,
        created_at=created_at,
    )
    return card


def make_signed_card(label: str, keypair=None, **kwargs):
    keypair = keypair or make_keypair(label)
    return sign_identity_card(make_card(label, keypair, **kwargs), keypair)


def make_rating(
    rater_label: str,
    subject_signed_card,
    answers=(TriState.YES, TriState.YES, TriState.YES),
    comment="",
    rated_at=T0,
):
    return RatingCard(
        q_identity=answers[0],
        q_hash_match=answers[1],
        q_authentic=answers[2],
        comment=comment,
        rater_address=ContactAddress.parse(f"{rater_label}@example.com"),
        subject_card=subject_signed_card,
        rated_at=rated_at,
    )


def make_signed_rating(rater_label: str, subject_signed_card, **kwargs):
    rating = make_rating(rater_label, subject_signed_card, **kwargs)
    return sign_rating_card(rating, make_keypair(rater_label))


@pytest.fixture
def alice_keypair():
    return make_keypair("alice")


@pytest.fixture
def alice_signed_card():
    return make_signed_card("alice")


@pytest.fixture
def keyserver():
    """Fresh in-memory keyserver with its mailbox, plus registration helper."""
    from amakey.server import InMemoryMailbox, KeyserverService
    from amakey.model import NoncePurpose

    mailbox = InMemoryMailbox()
    service = KeyserverService(delivery=mailbox)

    def register(label: str, signed_card=None):
        signed = signed_card or make_signed_card(label)
        service.begin_registration(signed)
        address = signed.card.contact_address
        nonce = mailbox.latest_nonce(address, NoncePurpose.REGISTER)
        service.confirm_registration(nonce)
        return signed

    service.mailbox = mailbox
    service.register_for_test = register
    return service
