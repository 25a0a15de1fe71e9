"""Delivery channel abstraction for address-ownership nonces.

Real deployments would plug in email or SMS; the defaults here are an
in-memory mailbox (tests) and a logging channel (operator-readable).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Protocol

from ..model import ContactAddress, NoncePurpose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeliveredNonce:
    address: ContactAddress
    purpose: NoncePurpose
    nonce_value: str
    verify_url: str


class DeliveryChannel(Protocol):
    def deliver(self, message: DeliveredNonce) -> None: ...


class InMemoryMailbox:
    """Collects delivered nonces per address for tests and the harness."""

    def __init__(self):
        self._messages: dict[str, list[DeliveredNonce]] = {}

    def deliver(self, message: DeliveredNonce) -> None:
        self._messages.setdefault(message.address.key(), []).append(message)

    def messages_for(self, address: ContactAddress) -> list[DeliveredNonce]:
        return list(self._messages.get(address.key(), []))

    def latest_nonce(self, address: ContactAddress, purpose: NoncePurpose) -> str | None:
        for message in reversed(self.messages_for(address)):
            if message.purpose is purpose:
                return message.nonce_value
        return None


class LoggingDelivery:
    """Writes the verification link to the log for desk-scale operation."""

    def deliver(self, message: DeliveredNonce) -> None:
        logger.info(
            "deliver %s nonce to %s: %s", message.purpose.value, message.address.value, message.verify_url
        )
