"""Signed local cache of trusted identity cards.

Each cached card is counter-signed with the local user's key, so anything
with write access to the cache directory (a sync service, another account)
cannot substitute a card without the client noticing. Entries that fail
either signature are treated as absent and reported as tampered.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from ..model import (
    ContactAddress,
    Keypair,
    SignedIdentityCard,
    canonical_encode,
    decode_identity_card,
    decode_timestamp,
    encode_timestamp,
    md5_hex,
    utc_now,
    verify_identity_card,
)
from ..model.encoding import canonical_bytes, decode_bytes, encode_bytes
from ..model.keys import verify as verify_signature


@dataclass(frozen=True)
class CacheEntry:
    signed_card: SignedIdentityCard
    client_signature: bytes
    cached_at: datetime


@dataclass(frozen=True)
class CacheLookup:
    """Result of a cache read: entry when intact, tampered when a file existed
    but failed verification."""

    entry: CacheEntry | None
    tampered: bool = False


class CardCache:
    def __init__(self, directory: str | Path, keypair: Keypair):
        self.directory = Path(directory)
        self.keypair = keypair
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, address: ContactAddress) -> Path:
        return self.directory / f"{address.scheme.value}-{md5_hex(address.value.encode('utf-8'))}.json"

    def put(self, signed_card: SignedIdentityCard) -> CacheEntry:
        """Counter-sign and persist a card. Call only after the card was
        auto-trusted or explicitly confirmed by the user."""
        card_bytes = canonical_encode(signed_card.card)
        entry = CacheEntry(
            signed_card=signed_card,
            client_signature=self.keypair.sign(card_bytes),
            cached_at=utc_now(),
        )
        payload = {
            "card_bytes": encode_bytes(card_bytes),
            "card_signature": encode_bytes(signed_card.signature),
            "client_signature": encode_bytes(entry.client_signature),
            "cached_at": encode_timestamp(entry.cached_at),
        }
        # A second signature over the whole entry makes every persisted byte
        # tamper-evident; the card-only counter-signature would leave
        # cached_at (and the file framing) unprotected.
        payload["entry_signature"] = encode_bytes(self.keypair.sign(canonical_bytes(payload)))
        path = self._path(signed_card.card.contact_address)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_bytes(payload).decode("utf-8"))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        return entry

    def get(self, address: ContactAddress) -> CacheLookup:
        path = self._path(address)
        if not path.exists():
            return CacheLookup(None)
        try:
            raw = path.read_bytes()
            payload = json.loads(raw.decode("utf-8"))
            entry_signature = decode_bytes(payload.pop("entry_signature"))
            if canonical_bytes(dict(payload, entry_signature=encode_bytes(entry_signature))) != raw:
                return CacheLookup(None, tampered=True)
            if not verify_signature(self.keypair.public, canonical_bytes(payload), entry_signature):
                return CacheLookup(None, tampered=True)
            card_bytes = decode_bytes(payload["card_bytes"])
            card = decode_identity_card(card_bytes)
            signed_card = SignedIdentityCard(card, decode_bytes(payload["card_signature"]))
            client_signature = decode_bytes(payload["client_signature"])
            cached_at = decode_timestamp(payload["cached_at"])
        except Exception:
            return CacheLookup(None, tampered=True)
        if card.contact_address != address:
            return CacheLookup(None, tampered=True)
        if not verify_signature(self.keypair.public, card_bytes, client_signature):
            return CacheLookup(None, tampered=True)
        if not verify_identity_card(signed_card):
            return CacheLookup(None, tampered=True)
        return CacheLookup(CacheEntry(signed_card, client_signature, cached_at))

    def delete(self, address: ContactAddress) -> None:
        path = self._path(address)
        if path.exists():
            path.unlink()
