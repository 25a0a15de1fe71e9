"""Human-verification challenges gating rating submission.

The default provider issues arithmetic puzzles in a fixed, parseable format.
It stands in for a production CAPTCHA service behind the same interface.
"""

from __future__ import annotations

import hashlib
import hmac
import random
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Protocol

from ..model import utc_now


@dataclass(frozen=True)
class Challenge:
    challenge_id: str
    puzzle: str
    answer_digest: str
    expires_at: datetime

    def public_view(self) -> dict:
        return {"challenge_id": self.challenge_id, "puzzle": self.puzzle}


class ChallengeProvider(Protocol):
    def issue(self) -> Challenge: ...

    def validate(self, challenge_id: str, answer: str) -> bool: ...


def _digest(answer: str) -> str:
    return hashlib.sha256(answer.strip().encode("utf-8")).hexdigest()


class ArithmeticChallengeProvider:
    """Single-use, expiring "What is A + B?" puzzles."""

    def __init__(
        self,
        ttl: timedelta = timedelta(minutes=10),
        rng: random.Random | None = None,
        clock: Callable[[], datetime] = utc_now,
    ):
        self.ttl = ttl
        self.rng = rng
        self.clock = clock
        self._pending: dict[str, Challenge] = {}
        self._lock = threading.Lock()

    def _rand_int(self, low: int, high: int) -> int:
        if self.rng is not None:
            return self.rng.randint(low, high)
        return secrets.randbelow(high - low + 1) + low

    def _token(self) -> str:
        if self.rng is not None:
            return "".join(self.rng.choice("0123456789abcdef") for _ in range(32))
        return secrets.token_hex(16)

    def issue(self) -> Challenge:
        a = self._rand_int(2, 97)
        b = self._rand_int(2, 97)
        challenge = Challenge(
            challenge_id=self._token(),
            puzzle=f"What is {a} + {b}?",
            answer_digest=_digest(str(a + b)),
            expires_at=self.clock() + self.ttl,
        )
        with self._lock:
            self._pending[challenge.challenge_id] = challenge
        return challenge

    def validate(self, challenge_id: str, answer: str) -> bool:
        """Consume the challenge. Valid exactly once, and never after expiry."""
        with self._lock:
            challenge = self._pending.pop(challenge_id, None)
        if challenge is None:
            return False
        if self.clock() > challenge.expires_at:
            return False
        return hmac.compare_digest(challenge.answer_digest, _digest(str(answer)))


def solve_arithmetic_puzzle(puzzle: str) -> str:
    """Solve the default provider's puzzle format (dev and test convenience)."""
    numbers = [int(tok) for tok in puzzle.replace("?", " ").split() if tok.isdigit()]
    if len(numbers) != 2:
        raise ValueError(f"not an arithmetic puzzle: {puzzle!r}")
    return str(numbers[0] + numbers[1])
