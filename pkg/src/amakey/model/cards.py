"""Signing and verification of identity cards, rating cards, and removal requests.

Verification is total: malformed or tampered input returns False rather than
raising, because these functions sit directly on untrusted wire data.
"""

from __future__ import annotations

from . import keys
from ..errors import ValidationError
from .encoding import canonical_encode
from .types import (
    IdentityCard,
    PublicKeyMaterial,
    RatingCard,
    RemovalRequest,
    SignedIdentityCard,
    SignedRatingCard,
    SignedRemovalRequest,
    validate_identity_card,
    validate_rating_card,
)


def sign_identity_card(card: IdentityCard, keypair: keys.Keypair) -> SignedIdentityCard:
    """Self-sign a card. The signing key must match the card's embedded public key."""
    if keypair.public != card.public_key:
        raise ValidationError("key_mismatch", "signing key does not match the card's public key")
    return SignedIdentityCard(card, keys.sign(keypair, canonical_encode(card)))


def verify_identity_card(signed: SignedIdentityCard) -> bool:
    """True iff the card satisfies its invariants and self-verifies under its embedded key."""
    try:
        card = signed.card
        validate_identity_card(card)
        return keys.verify(card.public_key, canonical_encode(card), signed.signature)
    except Exception:
        return False


def sign_rating_card(rating: RatingCard, keypair: keys.Keypair) -> SignedRatingCard:
    """Sign a rating with the rater's key. The embedded subject card must verify."""
    validate_rating_card(rating)
    if not verify_identity_card(rating.subject_card):
        raise ValidationError("bad_rating", "embedded subject card does not verify")
    return SignedRatingCard(rating, keys.sign(keypair, canonical_encode(rating)))


def verify_rating_card(signed: SignedRatingCard, rater_key: PublicKeyMaterial) -> bool:
    """True iff the rating verifies under the given rater key and is well-formed throughout."""
    try:
        rating = signed.rating
        validate_rating_card(rating)
        if not verify_identity_card(rating.subject_card):
            return False
        return keys.verify(rater_key, canonical_encode(rating), signed.signature)
    except Exception:
        return False


def sign_removal_request(request: RemovalRequest, keypair: keys.Keypair) -> SignedRemovalRequest:
    return SignedRemovalRequest(request, keys.sign(keypair, canonical_encode(request)))


def verify_removal_request(signed: SignedRemovalRequest, key: PublicKeyMaterial) -> bool:
    try:
        return keys.verify(key, canonical_encode(signed.request), signed.signature)
    except Exception:
        return False
