"""Storage backends: in-memory for tests, single-file append-log for persistence.

The append-log file holds one JSON mutation per line; a snapshot line
rewrites the full state and later mutations replay on top of it. Every
mutation is flushed and fsynced before the call returns.
"""

from __future__ import annotations

import json
import os
import threading
from datetime import datetime
from pathlib import Path
from typing import Protocol

from ..model import Nonce, NoncePurpose, decode_timestamp, encode_timestamp
from .records import NonceRecord, RegistrationRecord, RegistrationState, StoredRating
from .wire import signed_card_from_wire, signed_card_to_wire, signed_rating_from_wire, signed_rating_to_wire


class Storage(Protocol):
    def get_record(self, address_key: str) -> RegistrationRecord | None: ...

    def put_record(self, address_key: str, record: RegistrationRecord) -> None: ...

    def delete_record(self, address_key: str) -> None: ...

    def all_records(self) -> dict[str, RegistrationRecord]: ...

    def ratings_for(self, subject_key: str) -> dict[str, StoredRating]: ...

    def put_rating(self, subject_key: str, rater_key: str, stored: StoredRating) -> None: ...

    def delete_ratings_for_subject(self, subject_key: str) -> None: ...

    def delete_ratings_by_rater(self, rater_key: str) -> None: ...

    def get_nonce(self, value: str) -> NonceRecord | None: ...

    def put_nonce(self, record: NonceRecord) -> None: ...

    def delete_nonce(self, value: str) -> None: ...


class InMemoryStorage:
    """Plain dict-backed storage."""

    def __init__(self):
        self._records: dict[str, RegistrationRecord] = {}
        self._ratings: dict[str, dict[str, StoredRating]] = {}
        self._nonces: dict[str, NonceRecord] = {}

    def get_record(self, address_key):
        return self._records.get(address_key)

    def put_record(self, address_key, record):
        self._records[address_key] = record

    def delete_record(self, address_key):
        self._records.pop(address_key, None)

    def all_records(self):
        return dict(self._records)

    def ratings_for(self, subject_key):
        return dict(self._ratings.get(subject_key, {}))

    def put_rating(self, subject_key, rater_key, stored):
        self._ratings.setdefault(subject_key, {})[rater_key] = stored

    def delete_ratings_for_subject(self, subject_key):
        self._ratings.pop(subject_key, None)

    def delete_ratings_by_rater(self, rater_key):
        for ratings in self._ratings.values():
            ratings.pop(rater_key, None)

    def get_nonce(self, value):
        return self._nonces.get(value)

    def put_nonce(self, record):
        self._nonces[record.nonce.value] = record

    def delete_nonce(self, value):
        self._nonces.pop(value, None)


# --- append-log serialization -------------------------------------------------

def _ts(value: datetime | None) -> str | None:
    return None if value is None else encode_timestamp(value)


def _record_to_json(record: RegistrationRecord) -> dict:
    nonce = record.pending_nonce
    return {
        "signed_card": signed_card_to_wire(record.signed_card),
        "state": record.state.value,
        "pending_nonce": None
        if nonce is None
        else {"value": nonce.value, "issued_at": encode_timestamp(nonce.issued_at), "purpose": nonce.purpose.value},
        "created_at": encode_timestamp(record.created_at),
        "verified_at": _ts(record.verified_at),
    }


def _record_from_json(obj: dict) -> RegistrationRecord:
    nonce = obj["pending_nonce"]
    return RegistrationRecord(
        signed_card=signed_card_from_wire(obj["signed_card"]),
        state=RegistrationState(obj["state"]),
        pending_nonce=None
        if nonce is None
        else Nonce(nonce["value"], decode_timestamp(nonce["issued_at"]), NoncePurpose(nonce["purpose"])),
        created_at=decode_timestamp(obj["created_at"]),
        verified_at=None if obj["verified_at"] is None else decode_timestamp(obj["verified_at"]),
    )


def _rating_to_json(stored: StoredRating) -> dict:
    return {
        "signed_rating": signed_rating_to_wire(stored.signed_rating),
        "received_at": encode_timestamp(stored.received_at),
    }


def _rating_from_json(obj: dict) -> StoredRating:
    return StoredRating(
        signed_rating=signed_rating_from_wire(obj["signed_rating"]),
        received_at=decode_timestamp(obj["received_at"]),
    )


def _nonce_to_json(record: NonceRecord) -> dict:
    return {
        "value": record.nonce.value,
        "issued_at": encode_timestamp(record.nonce.issued_at),
        "purpose": record.nonce.purpose.value,
        "address_key": record.address_key,
    }


def _nonce_from_json(obj: dict) -> NonceRecord:
    return NonceRecord(
        nonce=Nonce(obj["value"], decode_timestamp(obj["issued_at"]), NoncePurpose(obj["purpose"])),
        address_key=obj["address_key"],
    )


class AppendLogStorage:
    """Durable storage over a single append-only JSON-lines file.

    Mutations delegate to an in-memory mirror and append a log entry. Load
    replays the file from the last snapshot. ``snapshot()`` compacts the
    file to a single state line.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._memory = InMemoryStorage()
        self._lock = threading.Lock()
        self._file = None
        self._load()
        self._file = open(self.path, "a", encoding="utf-8")

    def close(self):
        if self._file is not None:
            self._file.close()
            self._file = None

    # -- replay ---------------------------------------------------------------

    def _load(self):
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
            return
        entries = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        start = 0
        for i, entry in enumerate(entries):
            if entry["op"] == "snapshot":
                start = i
        for entry in entries[start:]:
            self._apply(entry)

    def _apply(self, entry: dict):
        op = entry["op"]
        if op == "snapshot":
            self._memory = InMemoryStorage()
            state = entry["state"]
            for key, rec in state["records"].items():
                self._memory.put_record(key, _record_from_json(rec))
            for subject, ratings in state["ratings"].items():
                for rater, stored in ratings.items():
                    self._memory.put_rating(subject, rater, _rating_from_json(stored))
            for nonce in state["nonces"]:
                self._memory.put_nonce(_nonce_from_json(nonce))
        elif op == "put_record":
            self._memory.put_record(entry["key"], _record_from_json(entry["record"]))
        elif op == "delete_record":
            self._memory.delete_record(entry["key"])
        elif op == "put_rating":
            self._memory.put_rating(entry["subject"], entry["rater"], _rating_from_json(entry["rating"]))
        elif op == "delete_ratings_for_subject":
            self._memory.delete_ratings_for_subject(entry["subject"])
        elif op == "delete_ratings_by_rater":
            self._memory.delete_ratings_by_rater(entry["rater"])
        elif op == "put_nonce":
            self._memory.put_nonce(_nonce_from_json(entry["nonce"]))
        elif op == "delete_nonce":
            self._memory.delete_nonce(entry["value"])
        else:
            raise ValueError(f"unknown log op: {op}")

    def _append(self, entry: dict):
        line = json.dumps(entry, sort_keys=True, separators=(",", ":"))
        self._file.write(line + "\n")
        self._file.flush()
        os.fsync(self._file.fileno())

    def _mutate(self, entry: dict):
        with self._lock:
            self._apply(entry)
            self._append(entry)

    def snapshot(self):
        """Compact the log to a single snapshot line."""
        with self._lock:
            state = {
                "records": {k: _record_to_json(r) for k, r in self._memory.all_records().items()},
                "ratings": {
                    subject: {rater: _rating_to_json(s) for rater, s in ratings.items()}
                    for subject, ratings in self._memory._ratings.items()
                    if ratings
                },
                "nonces": [_nonce_to_json(n) for n in self._memory._nonces.values()],
            }
            self._file.close()
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(json.dumps({"op": "snapshot", "state": state}, sort_keys=True, separators=(",", ":")) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.path)
            self._file = open(self.path, "a", encoding="utf-8")

    # -- reads ------------------------------------------------------------------

    def get_record(self, address_key):
        return self._memory.get_record(address_key)

    def all_records(self):
        return self._memory.all_records()

    def ratings_for(self, subject_key):
        return self._memory.ratings_for(subject_key)

    def get_nonce(self, value):
        return self._memory.get_nonce(value)

    # -- writes -----------------------------------------------------------------

    def put_record(self, address_key, record):
        self._mutate({"op": "put_record", "key": address_key, "record": _record_to_json(record)})

    def delete_record(self, address_key):
        self._mutate({"op": "delete_record", "key": address_key})

    def put_rating(self, subject_key, rater_key, stored):
        self._mutate(
            {"op": "put_rating", "subject": subject_key, "rater": rater_key, "rating": _rating_to_json(stored)}
        )

    def delete_ratings_for_subject(self, subject_key):
        self._mutate({"op": "delete_ratings_for_subject", "subject": subject_key})

    def delete_ratings_by_rater(self, rater_key):
        self._mutate({"op": "delete_ratings_by_rater", "rater": rater_key})

    def put_nonce(self, record):
        self._mutate({"op": "put_nonce", "nonce": _nonce_to_json(record)})

    def delete_nonce(self, value):
        self._mutate({"op": "delete_nonce", "value": value})
