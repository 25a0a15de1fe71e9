"""Client SDK: validating fetch, rating, caching, self-check, envelopes."""

from .cache import CacheEntry, CacheLookup, CardCache
from .envelope import DecryptedMessage, MessageEnvelope, decrypt_message, encrypt_message
from .sdk import (
    RATING_QUESTIONS,
    AmaClient,
    Finding,
    FindingKind,
    RatingDetail,
    ReportOutcome,
    SelfCheckResult,
    TrustReport,
)
from .transport import ApiResult, HttpTransport, InProcessTransport, Transport

__all__ = [
    "RATING_QUESTIONS",
    "AmaClient",
    "ApiResult",
    "CacheEntry",
    "CacheLookup",
    "CardCache",
    "DecryptedMessage",
    "Finding",
    "FindingKind",
    "HttpTransport",
    "InProcessTransport",
    "MessageEnvelope",
    "RatingDetail",
    "ReportOutcome",
    "SelfCheckResult",
    "Transport",
    "TrustReport",
    "decrypt_message",
    "encrypt_message",
]
