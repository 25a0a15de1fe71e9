"""The keyserver: registration, lookup, rating submission, and removal.

The server is designed to be untrusted. Everything it returns is
client-verifiable: cards and ratings carry detached signatures over
canonical bytes, and the aggregate stats it serves are recomputable from
the ratings themselves.

Ownership of a contact address is proven by round-tripping a single-use
nonce through a pluggable delivery channel; rating submission is gated by
a pluggable human-verification challenge.
"""

from __future__ import annotations

import secrets
import random
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable

from ..errors import ConflictError, NotFoundError, ValidationError
from ..model import (
    AggregateStats,
    ContactAddress,
    Nonce,
    NoncePurpose,
    SignedIdentityCard,
    SignedRatingCard,
    SignedRemovalRequest,
    aggregate,
    canonical_encode,
    utc_now,
    verify_identity_card,
    verify_rating_card,
    verify_removal_request,
)
from .challenges import ArithmeticChallengeProvider, Challenge, ChallengeProvider
from .delivery import DeliveredNonce, DeliveryChannel, InMemoryMailbox
from .records import NonceRecord, RegistrationRecord, RegistrationState, StoredRating
from .storage import InMemoryStorage, Storage

DEFAULT_NONCE_TTL = timedelta(hours=24)


@dataclass(frozen=True)
class LookupResult:
    signed_card: SignedIdentityCard
    ratings: list[SignedRatingCard]
    stats: AggregateStats


class KeyserverService:
    def __init__(
        self,
        storage: Storage | None = None,
        delivery: DeliveryChannel | None = None,
        challenges: ChallengeProvider | None = None,
        *,
        clock: Callable[[], datetime] = utc_now,
        nonce_rng: random.Random | None = None,
        nonce_ttl: timedelta = DEFAULT_NONCE_TTL,
        verify_base_url: str = "http://127.0.0.1:8824",
    ):
        self.storage = storage if storage is not None else InMemoryStorage()
        self.delivery = delivery if delivery is not None else InMemoryMailbox()
        self.challenges = challenges if challenges is not None else ArithmeticChallengeProvider(clock=clock)
        self.clock = clock
        self.nonce_rng = nonce_rng
        self.nonce_ttl = nonce_ttl
        self.verify_base_url = verify_base_url.rstrip("/")
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- internals -------------------------------------------------------------

    def _address_lock(self, address_key: str) -> threading.Lock:
        with self._locks_guard:
            lock = self._locks.get(address_key)
            if lock is None:
                lock = self._locks[address_key] = threading.Lock()
            return lock

    def _new_nonce(self, purpose: NoncePurpose) -> Nonce:
        if self.nonce_rng is not None:
            value = "".join(self.nonce_rng.choice("0123456789abcdef") for _ in range(32))
        else:
            value = secrets.token_hex(16)
        return Nonce(value, self.clock(), purpose)

    def _dispatch_nonce(self, address: ContactAddress, nonce: Nonce) -> None:
        self.storage.put_nonce(NonceRecord(nonce, address.key()))
        if nonce.purpose is NoncePurpose.REGISTER:
            url = f"{self.verify_base_url}/v1/verify?nonce={nonce.value}"
        else:
            url = f"{self.verify_base_url}/v1/remove/confirm?nonce={nonce.value}"
        self.delivery.deliver(DeliveredNonce(address, nonce.purpose, nonce.value, url))

    def _consume_nonce(self, value: str, purpose: NoncePurpose) -> NonceRecord:
        """Resolve, expiry-check, and delete a nonce atomically with respect to reuse."""
        if not isinstance(value, str):
            raise ValidationError("bad_nonce", "nonce must be a string")
        record = self.storage.get_nonce(value)
        if record is None:
            raise ValidationError("bad_nonce", "unknown or already used nonce")
        if record.nonce.purpose is not purpose:
            raise ValidationError("bad_nonce", "nonce was issued for a different purpose")
        if self.clock() > record.nonce.issued_at + self.nonce_ttl:
            self.storage.delete_nonce(value)
            raise ValidationError("bad_nonce", "nonce expired")
        self.storage.delete_nonce(value)
        return record

    def _delete_registration(self, address_key: str) -> None:
        """Remove a record, ratings on its card, and ratings authored by the address.

        Ratings authored by a removed address would no longer be verifiable
        by clients (the rater's key is gone), so serving them would make an
        honest server look dishonest.
        """
        self.storage.delete_record(address_key)
        self.storage.delete_ratings_for_subject(address_key)
        self.storage.delete_ratings_by_rater(address_key)

    # -- registration ------------------------------------------------------------

    def begin_registration(self, signed_card: SignedIdentityCard) -> dict:
        if not verify_identity_card(signed_card):
            raise ValidationError("bad_signature", "identity card does not verify")
        address = signed_card.card.contact_address
        with self._address_lock(address.key()):
            existing = self.storage.get_record(address.key())
            if existing is not None and existing.state is RegistrationState.VERIFIED:
                raise ConflictError("address already has a verified card; remove it before re-uploading")
            if existing is not None and existing.pending_nonce is not None:
                self.storage.delete_nonce(existing.pending_nonce.value)
            nonce = self._new_nonce(NoncePurpose.REGISTER)
            record = RegistrationRecord(
                signed_card=signed_card,
                state=RegistrationState.PENDING,
                pending_nonce=nonce,
                created_at=self.clock(),
            )
            self.storage.put_record(address.key(), record)
            self._dispatch_nonce(address, nonce)
        return {"pending": True}

    def confirm_registration(self, nonce_value: str) -> dict:
        record = self._consume_nonce(nonce_value, NoncePurpose.REGISTER)
        with self._address_lock(record.address_key):
            registration = self.storage.get_record(record.address_key)
            if (
                registration is None
                or registration.state is not RegistrationState.PENDING
                or registration.pending_nonce is None
                or registration.pending_nonce.value != nonce_value
            ):
                raise ValidationError("bad_nonce", "nonce does not match a pending registration")
            verified = RegistrationRecord(
                signed_card=registration.signed_card,
                state=RegistrationState.VERIFIED,
                pending_nonce=None,
                created_at=registration.created_at,
                verified_at=self.clock(),
            )
            self.storage.put_record(record.address_key, verified)
        return {"verified": True}

    # -- lookup ------------------------------------------------------------------

    def lookup(self, address: ContactAddress) -> LookupResult:
        record = self.storage.get_record(address.key())
        if record is None or record.state is not RegistrationState.VERIFIED:
            raise NotFoundError(f"no verified card for {address.value}")
        stored = self.storage.ratings_for(address.key())
        ratings = [s.signed_rating for s in sorted(stored.values(), key=lambda s: s.received_at)]
        stats = aggregate([r.rating for r in ratings])
        return LookupResult(record.signed_card, ratings, stats)

    # -- rating ------------------------------------------------------------------

    def issue_challenge(self) -> Challenge:
        return self.challenges.issue()

    def submit_rating(self, signed_rating: SignedRatingCard, challenge_id: str, challenge_answer: str) -> dict:
        if not self.challenges.validate(challenge_id, challenge_answer):
            raise ValidationError("bad_challenge", "challenge missing, expired, or answered incorrectly")

        rating = signed_rating.rating
        rater_record = self.storage.get_record(rating.rater_address.key())
        if rater_record is None or rater_record.state is not RegistrationState.VERIFIED:
            raise ValidationError("unknown_rater", "rater has no verified registration")
        rater_key = rater_record.signed_card.card.public_key
        if not verify_rating_card(signed_rating, rater_key):
            raise ValidationError("bad_signature", "rating does not verify under the rater's registered key")

        subject_address = rating.subject_card.card.contact_address
        with self._address_lock(subject_address.key()):
            subject_record = self.storage.get_record(subject_address.key())
            if subject_record is None or subject_record.state is not RegistrationState.VERIFIED:
                raise NotFoundError(f"no verified card for {subject_address.value}")
            current = subject_record.signed_card
            if (
                canonical_encode(rating.subject_card.card) != canonical_encode(current.card)
                or rating.subject_card.signature != current.signature
            ):
                raise ValidationError("stale_subject", "rating embeds a card that is no longer the stored card")

            existing = self.storage.ratings_for(subject_address.key()).get(rating.rater_address.key())
            if existing is not None and rating.rated_at < existing.signed_rating.rating.rated_at:
                raise ValidationError("stale_rating", "a newer rating from this rater is already stored")
            self.storage.put_rating(
                subject_address.key(),
                rating.rater_address.key(),
                StoredRating(signed_rating, received_at=self.clock()),
            )
        return {"stored": True}

    # -- removal -----------------------------------------------------------------

    def remove_signed(self, address: ContactAddress, signed_removal: SignedRemovalRequest) -> dict:
        with self._address_lock(address.key()):
            record = self.storage.get_record(address.key())
            if record is None or record.state is not RegistrationState.VERIFIED:
                raise NotFoundError(f"no verified card for {address.value}")
            if signed_removal.request.address != address:
                raise ValidationError("bad_request", "removal request names a different address")
            on_file = record.signed_card.card.public_key
            if not verify_removal_request(signed_removal, on_file):
                raise ValidationError("bad_signature", "removal request does not verify under the key on file")
            self._delete_registration(address.key())
        return {"removed": True}

    def begin_removal(self, address: ContactAddress) -> dict:
        with self._address_lock(address.key()):
            record = self.storage.get_record(address.key())
            if record is None or record.state is not RegistrationState.VERIFIED:
                raise NotFoundError(f"no verified card for {address.value}")
            nonce = self._new_nonce(NoncePurpose.REMOVE)
            self._dispatch_nonce(address, nonce)
        return {"pending": True}

    def confirm_removal(self, nonce_value: str) -> dict:
        record = self._consume_nonce(nonce_value, NoncePurpose.REMOVE)
        with self._address_lock(record.address_key):
            registration = self.storage.get_record(record.address_key)
            if registration is None or registration.state is not RegistrationState.VERIFIED:
                raise ValidationError("bad_nonce", "no verified registration to remove")
            self._delete_registration(record.address_key)
        return {"removed": True}
