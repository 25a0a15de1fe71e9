"""Keyserver: service logic, storage, delivery, challenges, HTTP front."""

from .challenges import ArithmeticChallengeProvider, Challenge, solve_arithmetic_puzzle
from .delivery import DeliveredNonce, InMemoryMailbox, LoggingDelivery
from .httpd import KeyserverHttpServer, make_server
from .records import NonceRecord, RegistrationRecord, RegistrationState, StoredRating
from .service import KeyserverService, LookupResult
from .storage import AppendLogStorage, InMemoryStorage

__all__ = [
    "AppendLogStorage",
    "ArithmeticChallengeProvider",
    "Challenge",
    "DeliveredNonce",
    "InMemoryMailbox",
    "InMemoryStorage",
    "KeyserverHttpServer",
    "KeyserverService",
    "LoggingDelivery",
    "LookupResult",
    "NonceRecord",
    "RegistrationRecord",
    "RegistrationState",
    "StoredRating",
    "make_server",
    "solve_arithmetic_puzzle",
]
