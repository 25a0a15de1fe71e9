"""Hybrid message envelopes with optional embedded sender cards.

A fresh random content key encrypts the message body with AES-256-GCM; the
recipient's public key wraps the content key. When a sender card is
supplied (the shared-address flow, where the sender's address cannot be
registered) the card rides inside the ciphertext, so only the recipient
learns who is behind the shared address.

The envelope's ``embedded_sender_card`` attribute is in-memory convenience
only; the wire form never carries the card outside the ciphertext.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from ..errors import EnvelopeError, ValidationError
from ..model import (
    KeyFingerprint,
    Keypair,
    SignedIdentityCard,
    fingerprint,
    verify_identity_card,
)
from ..model.encoding import (
    canonical_bytes,
    decode_bytes,
    encode_bytes,
)
from ..model.encoding import signed_card_to_struct, struct_to_signed_card
from ..model.keys import unwrap_key, wrap_key

_NONCE_LEN = 12
_CONTENT_KEY_LEN = 32
_CONTENT_TYPE = "message-content"


@dataclass(frozen=True)
class MessageEnvelope:
    recipient_fingerprint: KeyFingerprint
    wrapped_content_key: bytes
    nonce: bytes
    ciphertext: bytes
    embedded_sender_card: SignedIdentityCard | None = None

    def to_wire(self) -> dict:
        return {
            "recipient_fingerprint": self.recipient_fingerprint.digest,
            "wrapped_content_key": encode_bytes(self.wrapped_content_key),
            "nonce": encode_bytes(self.nonce),
            "ciphertext": encode_bytes(self.ciphertext),
        }

    @classmethod
    def from_wire(cls, obj: dict) -> "MessageEnvelope":
        if not isinstance(obj, dict) or set(obj) != {
            "recipient_fingerprint",
            "wrapped_content_key",
            "nonce",
            "ciphertext",
        }:
            raise ValidationError("bad_envelope", "envelope must carry exactly its four wire fields")
        return cls(
            recipient_fingerprint=KeyFingerprint(obj["recipient_fingerprint"]),
            wrapped_content_key=decode_bytes(obj["wrapped_content_key"]),
            nonce=decode_bytes(obj["nonce"]),
            ciphertext=decode_bytes(obj["ciphertext"]),
        )


@dataclass(frozen=True)
class DecryptedMessage:
    plaintext: bytes
    sender_card: SignedIdentityCard | None = None
    warnings: list[str] = field(default_factory=list)


def encrypt_message(
    plaintext: bytes,
    recipient_card: SignedIdentityCard,
    sender_card: SignedIdentityCard | None = None,
) -> MessageEnvelope:
    """Encrypt to a trusted recipient card. The caller is responsible for
    having established trust (cached or auto-trusted) beforehand."""
    if not verify_identity_card(recipient_card):
        raise ValidationError("bad_card", "recipient card does not verify")
    recipient_key = recipient_card.card.public_key
    recipient_fp = fingerprint(recipient_key)

    inner: dict = {"body": encode_bytes(plaintext), "type": _CONTENT_TYPE}
    if sender_card is not None:
        if not verify_identity_card(sender_card):
            raise ValidationError("bad_card", "sender card does not verify")
        inner["sender_card"] = signed_card_to_struct(sender_card)
    inner_bytes = canonical_bytes(inner)

    content_key = os.urandom(_CONTENT_KEY_LEN)
    nonce = os.urandom(_NONCE_LEN)
    ciphertext = AESGCM(content_key).encrypt(nonce, inner_bytes, recipient_fp.digest.encode("ascii"))
    return MessageEnvelope(
        recipient_fingerprint=recipient_fp,
        wrapped_content_key=wrap_key(recipient_key, content_key),
        nonce=nonce,
        ciphertext=ciphertext,
        embedded_sender_card=sender_card,
    )


def decrypt_message(envelope: MessageEnvelope, keypair: Keypair) -> DecryptedMessage:
    """Unwrap and decrypt. Raises EnvelopeError on a wrong key or any tampering;
    there is no partial plaintext on failure."""
    try:
        content_key = unwrap_key(keypair, envelope.wrapped_content_key)
    except Exception as exc:
        raise EnvelopeError(f"content key cannot be unwrapped with this private key: {exc}") from None
    try:
        inner_bytes = AESGCM(content_key).decrypt(
            envelope.nonce, envelope.ciphertext, envelope.recipient_fingerprint.digest.encode("ascii")
        )
    except Exception:
        raise EnvelopeError("ciphertext failed authentication") from None

    import json

    try:
        inner = json.loads(inner_bytes.decode("utf-8"))
        if not isinstance(inner, dict) or inner.get("type") != _CONTENT_TYPE:
            raise ValueError("wrong inner structure")
        plaintext = decode_bytes(inner["body"])
    except Exception as exc:
        raise EnvelopeError(f"malformed message content: {exc}") from None

    sender_card = None
    warnings: list[str] = []
    if "sender_card" in inner:
        try:
            candidate = struct_to_signed_card(inner["sender_card"])
        except Exception:
            candidate = None
        if candidate is not None and verify_identity_card(candidate):
            sender_card = candidate
        else:
            warnings.append("embedded sender card failed verification and was discarded")
    return DecryptedMessage(plaintext=plaintext, sender_card=sender_card, warnings=warnings)
