"""Server-side record types."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime

from ..model import Nonce, SignedIdentityCard, SignedRatingCard


class RegistrationState(enum.Enum):
    PENDING = "pending"
    VERIFIED = "verified"


@dataclass(frozen=True)
class RegistrationRecord:
    signed_card: SignedIdentityCard
    state: RegistrationState
    pending_nonce: Nonce | None
    created_at: datetime
    verified_at: datetime | None = None

    def __post_init__(self):
        if self.state is RegistrationState.VERIFIED and self.pending_nonce is not None:
            raise ValueError("verified records must not retain a pending nonce")


@dataclass(frozen=True)
class StoredRating:
    signed_rating: SignedRatingCard
    received_at: datetime


@dataclass(frozen=True)
class NonceRecord:
    """Binds an issued nonce to the address it must act on."""

    nonce: Nonce
    address_key: str
